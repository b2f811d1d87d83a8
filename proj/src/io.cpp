#include "qdensity/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace qdensity::io {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// Rows of a headed CSV with the given column names; blank lines skipped.
std::vector<std::pair<std::size_t, std::vector<std::string>>> read_csv(std::istream& in, const std::string& source,
                                                                       const std::vector<std::string>& header) {
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (!have_header) {
            if (fields != header) {
                std::string want;
                for (const auto& h : header) want += (want.empty() ? "" : ",") + h;
                throw ParseError(source, line_no, "expected header '" + want + "'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        }
        for (const auto& f : fields) {
            if (f.empty()) throw ParseError(source, line_no, "empty field");
        }
        rows.emplace_back(line_no, std::move(fields));
    }
    if (!have_header) throw ParseError(source, line_no, "file is empty");
    if (rows.empty()) throw ParseError(source, line_no, "no data rows");
    return rows;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return in;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

JointDistribution read_distribution_csv(std::istream& in, const std::string& source) {
    const auto rows = read_csv(in, source, {"x", "y", "p"});
    std::vector<std::string> xs, ys;
    std::map<std::string, std::size_t> xi, yi;
    std::map<std::pair<std::size_t, std::size_t>, double> entries;
    double total = 0.0;
    for (const auto& [line_no, f] : rows) {
        double p = 0.0;
        std::size_t used = 0;
        try {
            p = std::stod(f[2], &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != f[2].size() || !std::isfinite(p)) {
            throw ParseError(source, line_no, "probability '" + f[2] + "' is not a number");
        }
        if (p < 0.0) throw ParseError(source, line_no, "negative probability " + f[2]);
        const auto x = xi.emplace(f[0], xs.size()).first->second;
        if (x == xs.size()) xs.push_back(f[0]);
        const auto y = yi.emplace(f[1], ys.size()).first->second;
        if (y == ys.size()) ys.push_back(f[1]);
        if (!entries.emplace(std::make_pair(x, y), p).second) {
            throw ParseError(source, line_no, "duplicate pair (" + f[0] + ", " + f[1] + ")");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kSumTolerance) {
        throw std::invalid_argument(source + ": probabilities sum to " + format_double(total) + ", not 1");
    }
    std::vector<double> probs(xs.size() * ys.size(), 0.0);
    for (const auto& [key, p] : entries) probs[key.first * ys.size() + key.second] = p / total;
    return JointDistribution(Alphabet(std::move(xs)), Alphabet(std::move(ys)), std::move(probs));
}

JointDistribution read_distribution_csv_file(const std::string& path) {
    auto in = open_input(path);
    return read_distribution_csv(in, path);
}

fca::Relation read_relation_csv(std::istream& in, const std::string& source) {
    const auto rows = read_csv(in, source, {"x", "y"});
    std::vector<std::pair<std::string, std::string>> pairs;
    std::map<std::pair<std::string, std::string>, std::size_t> seen;
    for (const auto& [line_no, f] : rows) {
        if (!seen.emplace(std::make_pair(f[0], f[1]), line_no).second) {
            throw ParseError(source, line_no, "duplicate pair (" + f[0] + ", " + f[1] + ")");
        }
        pairs.emplace_back(f[0], f[1]);
    }
    return fca::Relation::from_pairs(pairs);
}

fca::Relation read_relation_csv_file(const std::string& path) {
    auto in = open_input(path);
    return read_relation_csv(in, path);
}

SequenceDataset read_dataset(std::istream& in, DatasetFormat format, const std::string& source) {
    std::vector<std::vector<std::string>> samples;
    std::vector<std::size_t> line_nos;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::vector<std::string> toks;
        for (std::string t; fields >> t;) toks.push_back(t);
        if (toks.empty()) continue;
        if (!samples.empty() && toks.size() != samples.front().size()) {
            throw ParseError(source, line_no,
                             "sample has " + std::to_string(toks.size()) + " tokens, expected " +
                                 std::to_string(samples.front().size()));
        }
        samples.push_back(std::move(toks));
        line_nos.push_back(line_no);
    }
    if (samples.empty()) throw ParseError(source, line_no, "dataset is empty");

    auto is_bits = [](const std::vector<std::string>& toks) {
        return toks.size() == 1 && toks[0].size() >= 2 &&
               toks[0].find_first_not_of("01") == std::string::npos;
    };
    bool bits = format == DatasetFormat::bits;
    if (format == DatasetFormat::automatic) {
        bits = true;
        for (const auto& s : samples) bits = bits && is_bits(s);
    }
    if (bits) {
        std::vector<std::string> lines;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const auto& s = samples[k];
            if (s.size() != 1 || s[0].find_first_not_of("01") != std::string::npos) {
                throw ParseError(source, line_nos[k], "expected a 0/1 string");
            }
            if (s[0].size() != samples.front()[0].size()) {
                throw ParseError(source, line_nos[k],
                                 "bitstring has length " + std::to_string(s[0].size()) + ", expected " +
                                     std::to_string(samples.front()[0].size()));
            }
            lines.push_back(s[0]);
        }
        return SequenceDataset::from_bitstrings(lines);
    }
    return SequenceDataset(samples);
}

SequenceDataset read_dataset_file(const std::string& path, DatasetFormat format) {
    auto in = open_input(path);
    return read_dataset(in, format, path);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string model_to_json(const mps::MatrixProductState& m) {
    json tensors = json::array();
    for (const auto& t : m.tensors()) {
        json outer = json::array();
        for (std::size_t l = 0; l < t.left; ++l) {
            json mid = json::array();
            for (std::size_t s = 0; s < t.phys; ++s) {
                json inner = json::array();
                for (std::size_t r = 0; r < t.right; ++r) inner.push_back(t(l, s, r));
                mid.push_back(std::move(inner));
            }
            outer.push_back(std::move(mid));
        }
        tensors.push_back(std::move(outer));
    }
    json doc = {{"n", m.n()}, {"physical_dim", m.physical_dim()}, {"bond_dims", m.bond_dims()}, {"tensors", tensors}};
    return doc.dump(1) + "\n";
}

mps::MatrixProductState model_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
    try {
        const auto n = doc.at("n").get<std::size_t>();
        const auto d = doc.at("physical_dim").get<std::size_t>();
        const auto bonds = doc.at("bond_dims").get<std::vector<std::size_t>>();
        const json& tj = doc.at("tensors");
        if (!tj.is_array() || tj.size() != n || bonds.size() != n) {
            throw std::invalid_argument("model JSON: expected " + std::to_string(n) + " tensors and bond dims");
        }
        std::vector<mps::Tensor3> tensors;
        for (std::size_t k = 0; k < n; ++k) {
            const json& a = tj[k];
            const std::size_t left = a.size();
            if (left == 0 || a[0].size() != d) throw std::invalid_argument("model JSON: tensor " + std::to_string(k) + " shape");
            const std::size_t right = a[0][0].size();
            if (right != bonds[k]) {
                throw std::invalid_argument("model JSON: tensor " + std::to_string(k) + " disagrees with bond_dims");
            }
            mps::Tensor3 t(left, d, right);
            for (std::size_t l = 0; l < left; ++l) {
                if (a[l].size() != d) throw std::invalid_argument("model JSON: ragged tensor " + std::to_string(k));
                for (std::size_t s = 0; s < d; ++s) {
                    if (a[l][s].size() != right) throw std::invalid_argument("model JSON: ragged tensor " + std::to_string(k));
                    for (std::size_t r = 0; r < right; ++r) t(l, s, r) = a[l][s][r].get<double>();
                }
            }
            tensors.push_back(std::move(t));
        }
        return mps::MatrixProductState(d, std::move(tensors));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("model JSON: ") + e.what());
    }
}

mps::MatrixProductState read_model_file(const std::string& path) { return model_from_json(read_file(path)); }

std::string experiment_csv(const std::vector<mps::ExperimentRow>& rows) {
    std::string out = "fraction,replica,seed,n_samples,bhattacharyya\n";
    for (const auto& r : rows) {
        out += format_double(r.fraction) + "," + std::to_string(r.replica) + "," + std::to_string(r.seed) + "," +
               std::to_string(r.n_samples) + "," + format_double(r.bhattacharyya) + "\n";
    }
    return out;
}

std::string read_file(const std::string& path) {
    auto in = open_input(path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << contents;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace qdensity::io
