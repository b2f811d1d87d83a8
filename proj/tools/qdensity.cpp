// qdensity: reduced densities, formal concepts, entailment queries and the
// parity MPS experiment from the command line.

#include "qdensity/entailment.hpp"
#include "qdensity/fca.hpp"
#include "qdensity/io.hpp"
#include "qdensity/mps.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
using namespace qdensity;

namespace {

json to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(m.row(r));
    return rows;
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
    } else {
        io::write_file(out_path, text);
    }
}

void emit(const json& doc, const std::string& out_path) { emit(doc.dump(2) + "\n", out_path); }

io::DatasetFormat dataset_format(bool bits, bool tokens) {
    if (bits && tokens) throw std::invalid_argument("--bits and --tokens are exclusive");
    if (bits) return io::DatasetFormat::bits;
    if (tokens) return io::DatasetFormat::tokens;
    return io::DatasetFormat::automatic;
}

std::size_t thread_count() {
    const char* env = std::getenv("QDENSITY_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    std::size_t used = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(env, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != std::string(env).size() || v == 0) {
        throw std::invalid_argument(std::string("QDENSITY_THREADS must be a positive integer, got '") + env + "'");
    }
    return v;
}

std::string sequence_text(const Sequence& s, std::size_t d) {
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (d <= 10) {
            out += static_cast<char>('0' + s[k]);
        } else {
            out += (k ? " " : "") + std::to_string(s[k]);
        }
    }
    return out;
}

// ---- reduce ----

struct ReduceArgs {
    std::string csv;
    std::string dataset;
    std::size_t cut = 0;
    bool full_product = false;
    bool bits = false;
    bool tokens = false;
    std::string out;
};

json reduce_report(const JointDistribution& pi, const DensityMatrix& rho_x, const DensityMatrix& rho_y) {
    const PureState psi = build_state(pi);
    const SchmidtData sd = schmidt(psi);
    json values = json::array(), ex = json::array(), ey = json::array();
    for (std::size_t k = 0; k < sd.coefficients.size(); ++k) {
        const double l = sd.coefficients[k] * sd.coefficients[k];
        if (l <= 1e-12) continue;
        values.push_back(l);
        ex.push_back(sd.x_vectors.column(k));
        ey.push_back(sd.y_vectors.column(k));
    }
    return {
        {"x_basis", pi.x_alphabet().symbols()},
        {"y_basis", pi.y_alphabet().symbols()},
        {"rho_x", to_json(rho_x.matrix())},
        {"rho_y", to_json(rho_y.matrix())},
        {"eigenvalues", values},
        {"eigenvectors", {{"x", ex}, {"y", ey}}},
        {"marginals", {{"x", born_distribution(rho_x)}, {"y", born_distribution(rho_y)}}},
        {"entropies",
         {{"x", von_neumann_entropy(rho_x)}, {"y", von_neumann_entropy(rho_y)}, {"entanglement", entanglement_entropy(psi)}}},
    };
}

void run_reduce(const ReduceArgs& a) {
    if (a.csv.empty() == a.dataset.empty()) throw std::invalid_argument("give exactly one of --csv or --dataset");
    if (!a.csv.empty()) {
        const JointDistribution pi = io::read_distribution_csv_file(a.csv);
        const PureState psi = build_state(pi);
        emit(reduce_report(pi, reduced_via_gram(psi, Side::X), reduced_via_gram(psi, Side::Y)), a.out);
        return;
    }
    if (a.cut == 0) throw std::invalid_argument("--dataset needs --cut");
    const SequenceDataset ds = io::read_dataset_file(a.dataset, dataset_format(a.bits, a.tokens));
    const EmpiricalGraph g = build_graph(ds, a.cut, a.full_product ? VertexSet::full_product : VertexSet::observed);
    emit(reduce_report(empirical_distribution(g), graph_reduced_density(g, Side::X), graph_reduced_density(g, Side::Y)),
         a.out);
}

// ---- concepts ----

struct ConceptArgs {
    std::string relation;
    bool compare_eigen = false;
    bool include_trivial = false;
    std::string out;
};

json concept_json(const fca::FormalConcept& c, const fca::Relation& r) {
    return {{"extent", fca::members(c.extent, r.x_alphabet())}, {"intent", fca::members(c.intent, r.y_alphabet())}};
}

void run_concepts(const ConceptArgs& a) {
    const fca::Relation r = io::read_relation_csv_file(a.relation);
    const auto concepts = a.include_trivial ? fca::formal_concepts(r) : fca::proper_concepts(r);
    json list = json::array();
    for (const auto& c : concepts) list.push_back(concept_json(c, r));
    json doc = {{"objects", r.x_alphabet().symbols()},
                {"attributes", r.y_alphabet().symbols()},
                {"concept_count", concepts.size()},
                {"concepts", list}};
    if (a.compare_eigen) {
        const auto report = fca::compare_eigen_concepts(r);
        json pairs = json::array();
        for (const auto& m : report.eigenpairs) {
            json concept_ref = nullptr;
            if (m.concept_index >= 0) concept_ref = concept_json(report.concepts[static_cast<std::size_t>(m.concept_index)], r);
            pairs.push_back({{"eigenvalue", m.eigenvalue},
                             {"x_vector", m.x_vector},
                             {"y_vector", m.y_vector},
                             {"closest_concept", concept_ref},
                             {"extent_cosine", m.extent_cosine},
                             {"intent_cosine", m.intent_cosine},
                             {"exact", m.exact}});
        }
        doc["comparison"] = {{"eigenpairs", pairs},
                             {"proper_concept_count", report.concepts.size()},
                             {"matched", report.matched},
                             {"unmatched_eigenpairs", report.unmatched_eigenpairs},
                             {"unmatched_concepts", report.unmatched_concepts},
                             {"coincide", report.coincide},
                             {"mismatch", !report.coincide}};
    }
    emit(doc, a.out);
}

// ---- entail ----

struct EntailArgs {
    std::string corpus;
    std::string pattern;
    std::string against;
    bool unnormalized = false;
    double scale = -1.0;
    bool bits = false;
    bool tokens = false;
    std::string out;
};

void run_entail(const EntailArgs& a) {
    const entailment::CorpusState cs(io::read_dataset_file(a.corpus, dataset_format(a.bits, a.tokens)));
    const auto p = entailment::parse_pattern(a.pattern);
    const auto q = entailment::parse_pattern(a.against);
    const bool normalized = !a.unnormalized;
    const auto rp = entailment::pattern_density(cs, p, normalized);
    const auto rq = entailment::pattern_density(cs, q, normalized);
    double scale = a.scale;
    std::string scale_source = "flag";
    if (scale < 0.0) {
        // Normalized densities only dominate after weighting by π(q | p).
        if (normalized && entailment::refines(q, p)) {
            scale = rq.weight / rp.weight;
            scale_source = "conditional_probability";
        } else {
            scale = 1.0;
            scale_source = "default";
        }
    }
    const double margin = entailment::loewner_margin(rp, rq, scale);
    auto density_json = [](const entailment::EntailmentDensity& d) {
        return json{{"pattern", entailment::format_pattern(d.pattern)}, {"matrix", to_json(d.matrix)}, {"weight", d.weight}};
    };
    json doc = {{"basis", cs.suffix_basis().symbols()},
                {"normalized", normalized},
                {"pattern", density_json(rp)},
                {"against", density_json(rq)},
                {"scale", scale},
                {"scale_source", scale_source},
                {"min_eigenvalue", margin},
                {"tolerance", entailment::kLoewnerTolerance},
                {"entails", margin >= -entailment::kLoewnerTolerance}};
    emit(doc, a.out);
}

// ---- parity ----

struct ParityArgs {
    std::size_t n = 0;
    double fraction = 1.0;
    std::vector<double> fractions;
    std::size_t replicas = 10;
    std::uint64_t seed = 0;
    std::size_t chi = 2;
    std::string data;
    std::string model;
    std::size_t count = 1;
    std::string out;
};

void run_parity_train(const ParityArgs& a) {
    mps::TrainConfig cfg;
    cfg.chi = a.chi;
    cfg.seed = a.seed;
    if (!a.data.empty()) {
        const SequenceDataset ds = io::read_dataset_file(a.data, io::DatasetFormat::bits);
        if (a.n != 0 && ds.length() != a.n) throw std::invalid_argument("--n disagrees with the data file");
        emit(io::model_to_json(mps::train(ds, cfg)), a.out);
        return;
    }
    if (a.n < 2 || a.n > 24) throw std::invalid_argument("--n must be in [2, 24]");
    if (!(a.fraction > 0.0 && a.fraction <= 1.0)) throw std::invalid_argument("--fraction must be in (0, 1]");
    const auto nt = static_cast<std::size_t>(std::llround(a.fraction * std::ldexp(1.0, static_cast<int>(a.n - 1))));
    if (nt < 1) throw std::invalid_argument("--fraction yields no samples");
    const SequenceDataset ds(Alphabet({"0", "1"}), mps::draw_even_strings(a.n, nt, a.seed), "");
    emit(io::model_to_json(mps::train(ds, cfg)), a.out);
}

void run_parity_eval(const ParityArgs& a) {
    const auto m = io::read_model_file(a.model);
    if (m.physical_dim() != 2) throw std::invalid_argument("eval needs a bitstring model");
    const auto target = mps::parity_target(m.n());
    json doc = {{"n", m.n()},
                {"norm", mps::inner_product(m, m)},
                {"inner_product", mps::inner_product(m, target)},
                {"bhattacharyya", mps::bhattacharyya(m, target)}};
    emit(doc, a.out);
}

void run_parity_sample(const ParityArgs& a) {
    const auto m = io::read_model_file(a.model);
    std::string text;
    for (const auto& s : mps::sample(m, a.count, a.seed)) text += sequence_text(s, m.physical_dim()) + "\n";
    emit(text, a.out);
}

void run_parity_experiment(const ParityArgs& a) {
    mps::TrainConfig cfg;
    cfg.chi = a.chi;
    cfg.seed = a.seed;
    const auto rows = mps::run_experiment(a.n, a.fractions, a.replicas, a.seed, cfg, thread_count());
    emit(io::experiment_csv(rows), a.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced densities, formal concepts, entailment and parity MPS training"};
    app.require_subcommand(1);

    ReduceArgs ra;
    auto* reduce = app.add_subcommand("reduce", "Reduced densities and their spectra");
    reduce->add_option("--csv", ra.csv, "Distribution CSV with header x,y,p");
    reduce->add_option("--dataset", ra.dataset, "Sequence dataset, one sample per line");
    reduce->add_option("--cut", ra.cut, "Prefix length for --dataset");
    reduce->add_flag("--full-product", ra.full_product, "Use every prefix/suffix over the alphabet as a basis vector");
    reduce->add_flag("--bits", ra.bits, "Read the dataset as 0/1 strings");
    reduce->add_flag("--tokens", ra.tokens, "Read the dataset as space-separated tokens");
    reduce->add_option("--out", ra.out, "Output file (default stdout)");
    reduce->callback([&] { run_reduce(ra); });

    ConceptArgs ca;
    auto* concepts = app.add_subcommand("concepts", "Formal concepts of a relation");
    concepts->add_option("relation", ca.relation, "Relation CSV with header x,y")->required();
    concepts->add_flag("--compare-eigen", ca.compare_eigen, "Compare concepts with reduced-density eigenvectors");
    concepts->add_flag("--include-trivial", ca.include_trivial, "Keep concepts with an empty extent or intent");
    concepts->add_option("--out", ca.out, "Output file (default stdout)");
    concepts->callback([&] { run_concepts(ca); });

    EntailArgs ea;
    auto* entail = app.add_subcommand("entail", "Loewner-order entailment between pattern densities");
    entail->add_option("corpus", ea.corpus, "Corpus file, one sentence per line")->required();
    entail->add_option("--pattern", ea.pattern, "Assignments like 3=orange or 2=ripe,3=orange")->required();
    entail->add_option("--against", ea.against, "Pattern whose density is compared")->required();
    entail->add_flag("--unnormalized", ea.unnormalized, "Compare unnormalized densities");
    entail->add_option("--scale", ea.scale, "Weight on the --against density")->check(CLI::NonNegativeNumber);
    entail->add_flag("--bits", ea.bits, "Read the corpus as 0/1 strings");
    entail->add_flag("--tokens", ea.tokens, "Read the corpus as space-separated tokens");
    entail->add_option("--out", ea.out, "Output file (default stdout)");
    entail->callback([&] { run_entail(ea); });

    ParityArgs pa;
    auto* parity = app.add_subcommand("parity", "Parity-learning MPS");
    parity->require_subcommand(1);

    auto* train = parity->add_subcommand("train", "Train a model and write it as JSON");
    train->add_option("--n", pa.n, "Sequence length");
    train->add_option("--fraction", pa.fraction, "Fraction of even strings to draw");
    train->add_option("--seed", pa.seed, "Dataset seed");
    train->add_option("--chi", pa.chi, "Bond dimension")->check(CLI::PositiveNumber);
    train->add_option("--data", pa.data, "Train on this bitstring file instead of a random draw");
    train->add_option("--out", pa.out, "Model file (default stdout)");
    train->callback([&] { run_parity_train(pa); });

    auto* eval = parity->add_subcommand("eval", "Overlap and Bhattacharyya distance to the parity target");
    eval->add_option("--model", pa.model, "Model JSON")->required();
    eval->add_option("--out", pa.out, "Output file (default stdout)");
    eval->callback([&] { run_parity_eval(pa); });

    auto* smp = parity->add_subcommand("sample", "Draw sequences from a model");
    smp->add_option("--model", pa.model, "Model JSON")->required();
    smp->add_option("--count", pa.count, "Number of samples");
    smp->add_option("--seed", pa.seed, "Sampler seed");
    smp->add_option("--out", pa.out, "Output file (default stdout)");
    smp->callback([&] { run_parity_sample(pa); });

    auto* exp = parity->add_subcommand("experiment", "Distance to the target across training fractions");
    exp->add_option("--n", pa.n, "Sequence length")->required();
    exp->add_option("--fractions", pa.fractions, "Comma-separated fractions")->required()->delimiter(',');
    exp->add_option("--replicas", pa.replicas, "Datasets per fraction");
    exp->add_option("--seed", pa.seed, "Base seed; replica r uses seed + r");
    exp->add_option("--chi", pa.chi, "Bond dimension")->check(CLI::PositiveNumber);
    exp->add_option("--out", pa.out, "CSV file (default stdout)");
    exp->callback([&] { run_parity_experiment(pa); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
