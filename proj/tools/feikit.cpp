// feikit command-line driver: analyze Boolean functions and decision trees,
// run verification suites, and drive the spectral-sample codec.
//
// Exit codes: 0 success, 1 property failure, 2 usage error, 3 contract
// violation (encoding outside the spectral support, malformed transcript).

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "feikit/feikit.hpp"

namespace {

using namespace feikit;

constexpr int kExitOk = 0;
constexpr int kExitPropertyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitContract = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TruthTable load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return TruthTable::read(in);
}

DecisionTree load_tree(const std::string& path, int n) {
  return DecisionTree::parse(slurp(path), n);
}

Subset parse_mask(const std::string& text) {
  try {
    if (text.rfind("0b", 0) == 0 || text.rfind("0B", 0) == 0) {
      if (text.size() == 2) throw ParseError("");
      Subset m = 0;
      for (std::size_t i = 2; i < text.size(); ++i) {
        if (text[i] != '0' && text[i] != '1') throw ParseError("");
        m = (m << 1) | static_cast<Subset>(text[i] - '0');
      }
      return m;
    }
    std::size_t used = 0;
    unsigned long v = std::stoul(text, &used, 0);  // handles 0x and decimal
    if (used != text.size()) throw ParseError("");
    return static_cast<Subset>(v);
  } catch (...) {
    throw ParseError("bad set mask '" + text + "' (decimal, 0x... or 0b...)");
  }
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + out_path + "'");
  out << text;
}

nlohmann::ordered_json dyadic_json(const Dyadic& d) {
  nlohmann::ordered_json j;
  j["exact"] = d.to_string();
  j["value"] = d.to_double();
  return j;
}

nlohmann::ordered_json analyze_function(const TruthTable& f, const Spectrum& spec) {
  nlohmann::ordered_json j;
  j["n"] = f.n();
  j["mean"] = dyadic_json(mean(f));
  j["variance"] = dyadic_json(variance(f));
  nlohmann::ordered_json inf;
  inf["total"] = dyadic_json(total_influence(f));
  inf["per_variable"] = nlohmann::ordered_json::array();
  for (int i = 1; i <= f.n(); ++i) inf["per_variable"].push_back(dyadic_json(influence(f, i)));
  j["influence"] = inf;
  nlohmann::ordered_json sp;
  auto support = spec.support();
  sp["support_size"] = support.size();
  sp["entropy_bits"] = spec.spectral_entropy();
  sp["weak_log_bound_holds"] = weak_entropy_bound_holds(f, spec);
  sp["entropy_influence_bound_holds"] = influence_entropy_bound_holds(f, spec);
  sp["coefficients"] = nlohmann::ordered_json::array();
  if (support.size() <= 64) {
    for (Subset s : support) {
      nlohmann::ordered_json c;
      c["mask"] = s;
      c["coefficient"] = dyadic_json(spec.coefficient(s));
      sp["coefficients"].push_back(c);
    }
  }
  j["spectrum"] = sp;
  return j;
}

nlohmann::ordered_json analyze_tree(const DecisionTree& t) {
  TruthTable f = to_truth_table(t);
  Spectrum spec = fourier_transform(f);
  nlohmann::ordered_json j = analyze_function(f, spec);
  nlohmann::ordered_json tj;
  tj["text"] = t.format();
  tj["nodes"] = t.node_count();
  tj["expected_depth"] = dyadic_json(t.expected_depth());
  tj["max_read"] = t.max_read();

  CovReport cov = tree_covariance(t);
  nlohmann::ordered_json cj;
  cj["total"] = dyadic_json(cov.total);
  cj["per_variable"] = nlohmann::ordered_json::object();
  for (const auto& [v, c] : cov.per_variable) cj["per_variable"][std::to_string(v)] = dyadic_json(c);
  tj["covariance"] = cj;

  CovarianceBounds cb = covariance_bounds_report(t, spec);
  nlohmann::ordered_json bj;
  bj["cov_le_expected_depth"] = cb.depth_bound;
  bj["cov_le_readk_variance"] = cb.read_bound;
  bj["cov_le_multiplicity_sum"] = cb.multiplicity_bound;
  tj["covariance_bounds"] = bj;

  PathBoundsReport pb = path_probability_bounds(t);
  nlohmann::ordered_json pj;
  pj["all_hold"] = pb.all_hold;
  pj["per_variable"] = nlohmann::ordered_json::array();
  for (const auto& b : pb.per_variable) {
    nlohmann::ordered_json e;
    e["var"] = b.var;
    e["path_probability"] = dyadic_json(b.probability);
    e["influence"] = dyadic_json(b.influence);
    e["covariance"] = dyadic_json(b.covariance);
    e["slack"] = dyadic_json(b.slack);
    pj["per_variable"].push_back(e);
  }
  tj["path_probability_bounds"] = pj;

  ProtocolLengthReport lr = protocol_length_report(t);
  nlohmann::ordered_json lj;
  lj["expected_length"] = dyadic_json(lr.expected_length);
  lj["influence_cov_budget"] = dyadic_json(lr.influence_cov_budget);
  lj["influence_cov_slack"] = dyadic_json(lr.influence_cov_budget - lr.expected_length);
  lj["read_budget"] = dyadic_json(lr.read_budget);
  lj["depth_budget"] = dyadic_json(lr.depth_budget);
  lj["all_within"] = lr.all_hold();
  tj["protocol_length"] = lj;

  EntropyBudgetReport er = entropy_budget_report(t);
  nlohmann::ordered_json ej;
  ej["entropy_bits"] = er.entropy;
  ej["apf_chain_bound"] = er.apf_chain_bound;
  ej["general_read_bound"] = er.general_read_bound;
  ej["nine_k_bound"] = er.nine_k_bound;
  ej["nine_k_margin"] = er.nine_k_bound - er.entropy;
  ej["twelve_d_bound"] = er.twelve_d_bound;
  ej["twelve_d_margin"] = er.twelve_d_bound - er.entropy;
  ej["influence_at_least_one"] = er.influence_at_least_one;
  ej["chain_holds"] = er.chain_holds;
  tj["entropy_chain"] = ej;

  j["tree"] = tj;
  return j;
}

int cmd_analyze(const std::string& tree_path, const std::string& table_path, int n,
                const std::string& out_path, const std::string& format) {
  nlohmann::ordered_json j;
  Spectrum spec(1);
  bool ok = true;
  if (!tree_path.empty()) {
    DecisionTree t = load_tree(tree_path, n);
    spec = fourier_transform(to_truth_table(t));
    j = analyze_tree(t);
    ok = j["tree"]["covariance_bounds"]["cov_le_expected_depth"].get<bool>() &&
         j["tree"]["covariance_bounds"]["cov_le_readk_variance"].get<bool>() &&
         j["tree"]["covariance_bounds"]["cov_le_multiplicity_sum"].get<bool>() &&
         j["tree"]["path_probability_bounds"]["all_hold"].get<bool>() &&
         j["tree"]["protocol_length"]["all_within"].get<bool>() &&
         j["tree"]["entropy_chain"]["chain_holds"].get<bool>();
  } else {
    TruthTable f = load_table(table_path);
    if (n != 0 && n != f.n()) throw ParseError("--n disagrees with the table header");
    spec = fourier_transform(f);
    j = analyze_function(f, spec);
  }
  ok = ok && j["spectrum"]["weak_log_bound_holds"].get<bool>() &&
       j["spectrum"]["entropy_influence_bound_holds"].get<bool>();
  if (format == "csv") {
    std::ostringstream ss;
    spec.write_csv(ss);
    emit(ss.str(), out_path);
  } else {
    emit(j.dump(2) + "\n", out_path);
  }
  return ok ? kExitOk : kExitPropertyFailure;
}

int cmd_verify(const std::string& suite, const GenConfig& cfg, const std::string& out_path,
               const std::string& format) {
  SuiteReport rep = run_suite(suite, cfg);
  std::string text = format == "csv" ? rep.to_csv() : rep.to_json_text();
  emit(text, out_path);
  if (!rep.all_pass() && !out_path.empty()) {
    // serialize witnesses next to the report for replay
    int idx = 0;
    for (const auto& p : rep.properties) {
      if (p.pass || p.witness.empty()) continue;
      std::ofstream w(out_path + ".witness-" + std::to_string(idx++) + "-" + p.name + ".txt");
      w << p.claim << "\n" << p.witness << "\n";
    }
  }
  for (const auto& p : rep.properties)
    std::cerr << (p.pass ? "[pass] " : "[FAIL] ") << rep.suite << "/" << p.name << "\n";
  return rep.all_pass() ? kExitOk : kExitPropertyFailure;
}

int cmd_encode(const std::string& tree_path, const std::string& set_text, int n,
               std::uint64_t seed) {
  DecisionTree t = load_tree(tree_path, n);
  Subset s = parse_mask(set_text);
  SplitMix64 rng(seed);
  Transcript tr = encode(t, s, rng);
  std::cout << tr.text() << "\n";
  return kExitOk;
}

int cmd_decode(const std::string& tree_path, const std::string& transcript_text, int n) {
  DecisionTree t = load_tree(tree_path, n);
  Subset s = decode(t, Transcript::from_text(transcript_text));
  std::cout << s << "\n";
  return kExitOk;
}

int cmd_gen(const std::string& kind, const GenConfig& cfg, int layers,
            const std::string& inner_path, const std::string& table_path, int gadget_k,
            bool balanced, const std::string& out_path) {
  SplitMix64 rng(cfg.seed);
  if (kind == "tree") {
    emit(random_tree(cfg, rng).format() + "\n", out_path);
    return kExitOk;
  }
  if (kind == "bad-tree") {
    DecisionTree inner = inner_path.empty()
                             ? [&] {
                                 GenConfig inner_cfg = cfg;
                                 inner_cfg.max_read = 1;
                                 return random_tree(inner_cfg, rng);
                               }()
                             : load_tree(inner_path, 0);
    emit(dummy_layered_tree(layers, inner).format() + "\n", out_path);
    return kExitOk;
  }
  if (kind == "gadget") {
    if (table_path.empty()) throw ParseError("gen gadget: --table is required");
    TruthTable f = load_table(table_path);
    std::ostringstream ss;
    small_influence_gadget(f, gadget_k).write(ss);
    emit(ss.str(), out_path);
    return kExitOk;
  }
  if (kind == "table") {
    TruthTable f = balanced ? TruthTable::random_balanced(cfg.n, rng)
                            : TruthTable::random(cfg.n, rng);
    std::ostringstream ss;
    f.write(ss);
    emit(ss.str(), out_path);
    return kExitOk;
  }
  throw ParseError("gen: unknown kind '" + kind + "' (tree, bad-tree, gadget, table)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact Fourier analysis of Boolean functions, decision-tree spectral coding, "
               "and property verification"};
  app.require_subcommand(1);

  std::string tree_path, table_path, out_path, format = "json";
  std::string suite, set_text, transcript_text, kind, inner_path;
  int n = 0, layers = 2, gadget_k = 2;
  bool balanced = false;
  GenConfig cfg;
  cfg.trials = 1000;

  auto* analyze = app.add_subcommand("analyze", "spectrum, influences, covariances and bounds");
  analyze->add_option("--tree", tree_path, "decision tree file (s-expression)");
  analyze->add_option("--table", table_path, "truth table file (n=<int> + hex)");
  analyze->add_option("--n", n, "variable count when the input does not mention all variables");
  analyze->add_option("--out", out_path, "write the report here instead of stdout");
  analyze->add_option("--format", format, "json|csv (csv = spectrum export)");

  auto* verify = app.add_subcommand("verify", "run a property suite and write its report");
  verify->add_option("--suite", suite,
                     "fourier|covariance|protocol|biased|composition|gadgets")->required();
  verify->add_option("--n", cfg.n, "variable count for generated instances");
  verify->add_option("--k", cfg.max_read, "read budget for generated trees");
  verify->add_option("--depth", cfg.target_depth, "target expected depth");
  verify->add_option("--leaf-bias", cfg.leaf_bias, "probability of a +1 leaf");
  verify->add_option("--trials", cfg.trials, "number of generated instances");
  verify->add_option("--seed", cfg.seed, "root seed (default 1729)");
  verify->add_option("--out", out_path, "write the report here instead of stdout");
  verify->add_option("--format", format, "json|csv");

  auto* enc = app.add_subcommand("encode", "spectral-sample protocol encoder");
  enc->add_option("--tree", tree_path, "decision tree file")->required();
  enc->add_option("--set", set_text, "subset mask (decimal, 0x... or 0b...)")->required();
  enc->add_option("--n", n, "variable count");
  enc->add_option("--seed", cfg.seed, "seed for the branch randomness");

  auto* dec = app.add_subcommand("decode", "spectral-sample protocol decoder");
  dec->add_option("--tree", tree_path, "decision tree file")->required();
  dec->add_option("--transcript", transcript_text, "transcript text over 0/1/#")->required();
  dec->add_option("--n", n, "variable count");

  auto* gen = app.add_subcommand("gen", "emit generator outputs");
  gen->add_option("--kind", kind, "tree|bad-tree|gadget|table")->required();
  gen->add_option("--n", cfg.n, "variable count");
  gen->add_option("--k", cfg.max_read, "read budget (tree)");
  gen->add_option("--depth", cfg.target_depth, "target expected depth (tree)");
  gen->add_option("--leaf-bias", cfg.leaf_bias, "probability of a +1 leaf (tree)");
  gen->add_option("--seed", cfg.seed, "seed");
  gen->add_option("--layers", layers, "dummy layers (bad-tree)");
  gen->add_option("--inner", inner_path, "inner tree file (bad-tree)");
  gen->add_option("--table", table_path, "base table file (gadget)");
  gen->add_option("--gadget-k", gadget_k, "guard variables (gadget)");
  gen->add_flag("--balanced", balanced, "balanced random table (table)");
  gen->add_option("--out", out_path, "output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      if (tree_path.empty() == table_path.empty())
        throw ParseError("analyze: exactly one of --tree / --table is required");
      return cmd_analyze(tree_path, table_path, n, out_path, format);
    }
    if (verify->parsed()) return cmd_verify(suite, cfg, out_path, format);
    if (enc->parsed()) return cmd_encode(tree_path, set_text, n, cfg.seed);
    if (dec->parsed()) return cmd_decode(tree_path, transcript_text, n);
    if (gen->parsed()) return cmd_gen(kind, cfg, layers, inner_path, table_path, gadget_k,
                                      balanced, out_path);
  } catch (const SupportError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const TranscriptError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitContract;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPropertyFailure;
  }
  return kExitUsage;
}
