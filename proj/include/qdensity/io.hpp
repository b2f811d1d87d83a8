#pragma once

// File formats: distribution and relation CSVs, sequence datasets, model
// JSON and experiment CSV.

#include "qdensity/fca.hpp"
#include "qdensity/mps.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdensity::io {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Distributions whose total is within this of 1 are rescaled to sum to 1.
inline constexpr double kSumTolerance = 1e-9;

/// Header `x,y,p`; one row per nonzero entry.
JointDistribution read_distribution_csv(std::istream& in, const std::string& source = "<input>");
JointDistribution read_distribution_csv_file(const std::string& path);

/// Header `x,y`; one related pair per row.
fca::Relation read_relation_csv(std::istream& in, const std::string& source = "<input>");
fca::Relation read_relation_csv_file(const std::string& path);

enum class DatasetFormat { automatic, tokens, bits };

/// One sample per line, tokens separated by spaces; blank lines skipped.
/// `automatic` reads bitstrings when every line is a 0/1 string of length ≥ 2.
SequenceDataset read_dataset(std::istream& in, DatasetFormat format = DatasetFormat::automatic,
                             const std::string& source = "<input>");
SequenceDataset read_dataset_file(const std::string& path, DatasetFormat format = DatasetFormat::automatic);

std::string format_double(double x);

std::string model_to_json(const mps::MatrixProductState& m);
mps::MatrixProductState model_from_json(const std::string& text);
mps::MatrixProductState read_model_file(const std::string& path);

std::string experiment_csv(const std::vector<mps::ExperimentRow>& rows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace qdensity::io
