// command-line front end: degree, bound, surplus, verify, experiment, search
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "xratio/xratio.hpp"

namespace {

using namespace xratio;
namespace fs = std::filesystem;

struct InputOpts {
  std::string path = "-";
  std::string format = "auto";
};

void add_input_opts(CLI::App* sub, InputOpts& in) {
  sub->add_option("-i,--input", in.path, "input file, or - for stdin")
      ->required();
  sub->add_option("--format", in.format, "input format")
      ->check(CLI::IsMember({"auto", "json", "plain"}))
      ->capture_default_str();
}

std::string slurp(const std::string& path) {
  std::ostringstream ss;
  if (path == "-") {
    ss << std::cin.rdbuf();
    if (std::cin.bad()) throw IoError("cannot read standard input");
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

Format pick_format(const std::string& text, const std::string& flag) {
  if (flag == "json") return Format::json;
  if (flag == "plain") return Format::plain;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      return c == '{' ? Format::json : Format::plain;
  throw ParseError("empty input");
}

Hypergraph load(const InputOpts& in) {
  const std::string text = slurp(in.path);
  return parse_hypergraph(text, pick_format(text, in.format));
}

std::optional<VertexTriple> parse_triple(const std::vector<int>& vals) {
  if (vals.empty()) return std::nullopt;
  if (vals.size() != 3)
    throw std::invalid_argument("--triple needs exactly three vertices");
  return VertexTriple(vals[0], vals[1], vals[2]);
}

std::string fmt6(double x) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(6) << x;
  return ss.str();
}

std::chrono::steady_clock::duration budget_of(double seconds) {
  return std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(seconds));
}

nlohmann::ordered_json triple_json(const VertexTriple& t) {
  return nlohmann::ordered_json::array({t.v[0], t.v[1], t.v[2]});
}

// --- subcommand bodies; each returns the process exit code ---

int run_degree(const InputOpts& in, double timeout, bool as_json) {
  const Hypergraph h = load(in);
  const std::uint64_t d = cross_ratio_degree(h, budget_of(timeout));
  if (as_json) {
    nlohmann::ordered_json j;
    j["degree"] = d;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << d << '\n';
  }
  return 0;
}

int run_surplus(const InputOpts& in, bool as_json) {
  const Hypergraph h = load(in);
  const int s = surplus(h);
  if (as_json) {
    nlohmann::ordered_json j;
    j["n"] = h.vertex_count();
    j["edge_count"] = h.edge_count();
    j["surplus"] = s;
    j["criterion_met"] = s == 3;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << s << '\n';
  }
  return 0;
}

int run_bound(const InputOpts& in, const std::vector<int>& triple_vals,
              bool as_json) {
  const Hypergraph h = load(in);
  const std::optional<VertexTriple> t = parse_triple(triple_vals);
  const BoundReport rep = min_matching_bound(h);
  if (t) {
    const auto it = rep.per_triple.find(*t);
    if (it == rep.per_triple.end())
      throw std::invalid_argument("triple " + to_string(*t) +
                                  " is out of range");
    if (as_json) {
      nlohmann::ordered_json j;
      j["triple"] = triple_json(*t);
      j["bound"] = it->second;
      j["bregman_minc"] = bregman_minc(h, *t);
      std::cout << j.dump(2) << '\n';
    } else {
      std::cout << it->second << '\n';
    }
    return 0;
  }
  if (as_json) {
    nlohmann::ordered_json j;
    j["n"] = h.vertex_count();
    j["min_bound"] = rep.min_bound;
    j["surplus"] = rep.surplus;
    j["argmin_count"] = rep.argmin_triples.size();
    j["argmin_first"] = triple_json(rep.argmin_triples.front());
    j["bregman_minc_at_argmin"] = rep.bregman_minc_at_argmin;
    j["uniform_bound_24"] = rep.uniform_bound_24;
    j["uniform_bound_pow2"] = rep.uniform_bound_pow2;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "min bound " << rep.min_bound << " (surplus " << rep.surplus
              << ", " << rep.argmin_triples.size() << " argmin triples, first "
              << to_string(rep.argmin_triples.front()) << ")\n"
              << "bregman-minc at argmin " << fmt6(rep.bregman_minc_at_argmin)
              << '\n'
              << "uniform bounds " << fmt6(rep.uniform_bound_24) << ' '
              << rep.uniform_bound_pow2 << '\n';
  }
  return 0;
}

int run_verify(const InputOpts& in, const std::vector<int>& triple_vals,
               double timeout, bool as_json) {
  const Hypergraph h = load(in);
  const std::optional<VertexTriple> focus = parse_triple(triple_vals);
  const BoundReport rep = min_matching_bound(h);
  const BiadjacencyMatrix inc = incidence_matrix(h);
  const bool can_enumerate = h.edge_count() <= 12;

  if (focus && rep.per_triple.find(*focus) == rep.per_triple.end())
    throw std::invalid_argument("triple " + to_string(*focus) +
                                " is out of range");

  std::vector<VertexTriple> triples;
  if (focus)
    triples.push_back(*focus);
  else
    triples = all_triples(h.vertex_count());

  bool ok = true;
  std::ostringstream report;
  nlohmann::ordered_json jt = nlohmann::ordered_json::array();
  for (const VertexTriple& t : triples) {
    const std::uint64_t perm = rep.per_triple.at(t);
    std::optional<std::uint64_t> coh;
    try {
      coh = cohomology_bound(h, t);
    } catch (const std::invalid_argument&) {
      // a vertex outside t has empty star: the reduced matrix has a zero
      // column, so the permanent must vanish
      if (perm != 0) {
        report << "MISMATCH: triple " << to_string(t)
               << " skips the ring computation yet has permanent " << perm
               << '\n';
        ok = false;
      }
    }
    std::optional<std::uint64_t> enumd;
    if (can_enumerate)
      enumd = enumerate_perfect_matchings(delete_vertices(inc, t)).size();
    const double bm = bregman_minc(h, t);

    if (coh && *coh != perm) ok = false;
    if (enumd && *enumd != perm) ok = false;
    if (static_cast<double>(perm) > bm + 1e-9) ok = false;

    report << "triple " << to_string(t) << ": permanent " << perm
           << ", cohomology " << (coh ? std::to_string(*coh) : "n/a")
           << ", enumeration " << (enumd ? std::to_string(*enumd) : "n/a")
           << ", bregman-minc " << fmt6(bm);
    if ((coh && *coh != perm) || (enumd && *enumd != perm) ||
        static_cast<double>(perm) > bm + 1e-9)
      report << "  MISMATCH";
    report << '\n';

    nlohmann::ordered_json row;
    row["triple"] = triple_json(t);
    row["permanent"] = perm;
    row["cohomology"] = coh ? nlohmann::ordered_json(*coh)
                            : nlohmann::ordered_json(nullptr);
    row["enumeration"] = enumd ? nlohmann::ordered_json(*enumd)
                               : nlohmann::ordered_json(nullptr);
    row["bregman_minc"] = bm;
    jt.push_back(std::move(row));
  }

  const std::uint64_t degree = cross_ratio_degree(h, budget_of(timeout));
  const std::uint64_t compared =
      focus ? rep.per_triple.at(*focus) : rep.min_bound;
  if (degree > compared) {
    report << "MISMATCH: degree " << degree << " exceeds bound " << compared
           << '\n';
    ok = false;
  }
  const std::uint64_t gap = compared - std::min(degree, compared);

  if (as_json) {
    nlohmann::ordered_json j;
    j["n"] = h.vertex_count();
    j["edge_count"] = h.edge_count();
    j["triples"] = std::move(jt);
    j["degree"] = degree;
    j["min_bound"] = rep.min_bound;
    j["surplus"] = rep.surplus;
    j["uniform_bound_24"] = rep.uniform_bound_24;
    j["uniform_bound_pow2"] = rep.uniform_bound_pow2;
    j["compared_bound"] = compared;
    j["gap"] = gap;
    j["tight"] = gap == 0;
    j["ok"] = ok;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << report.str() << "degree " << degree << '\n'
              << "min bound " << rep.min_bound << " (surplus " << rep.surplus
              << ", " << rep.argmin_triples.size() << " argmin triples)\n"
              << "uniform bounds " << fmt6(rep.uniform_bound_24) << ' '
              << rep.uniform_bound_pow2 << '\n';
    if (gap == 0)
      std::cout << "TIGHT\n";
    else
      std::cout << "GAP " << gap << '\n';
    std::cout << (ok ? "verify: ok\n" : "verify: MISMATCH\n");
  }
  return ok ? 0 : 1;
}

struct ExperimentOpts {
  ExperimentConfig cfg;
  double timeout_seconds = 60.0;
  std::string filter = "bound_positive";
  std::string output = "experiment.csv";
  std::string histogram;  // empty, "text", or "svg"
};

fs::path sibling(const fs::path& base, const std::string& suffix) {
  fs::path p = base;
  p.replace_filename(base.stem().string() + suffix);
  return p;
}

int run_experiment_cmd(ExperimentOpts& opts) {
  opts.cfg.filter = opts.filter == "none" ? SampleFilter::none
                                          : SampleFilter::bound_positive;
  opts.cfg.instance_timeout = std::chrono::milliseconds(
      std::llround(opts.timeout_seconds * 1000.0));
  const ExperimentResult res = run_experiment(opts.cfg);

  const fs::path csv_path(opts.output);
  write_file_atomic(csv_path, experiment_csv(res.records));
  const std::string summary = summary_json(opts.cfg, res.summary);
  write_file_atomic(sibling(csv_path, ".summary.json"), summary);
  if (!opts.histogram.empty()) {
    if (res.summary.accepted == 0) {
      std::cerr << "no accepted samples; histogram skipped\n";
    } else {
      const bool svg = opts.histogram == "svg";
      write_file_atomic(
          sibling(csv_path, svg ? ".hist.svg" : ".hist.txt"),
          render_histogram(res.summary,
                           svg ? HistogramFormat::svg : HistogramFormat::text));
    }
  }
  std::cout << summary;
  if (!res.reached_target) {
    std::cerr << "attempt budget exhausted before reaching " << opts.cfg.samples
              << " samples\n";
    return 4;
  }
  return 0;
}

int run_search(int n, std::uint64_t samples, std::uint64_t seed,
               std::uint64_t max_attempts, const std::string& output) {
  const SearchResult res = search_sigma3_zero_degree(n, samples, seed,
                                                     max_attempts);
  if (res.hits.empty()) {
    std::cout << "no counterexamples found\n"
              << "examined " << res.examined << " instances with surplus 3 ("
              << res.attempts << " attempts)\n";
  } else {
    nlohmann::ordered_json hits = nlohmann::ordered_json::array();
    for (const SearchHit& hit : res.hits) {
      std::cout << "counterexample at counter " << hit.counter << ", seed "
                << hit.instance_seed << ": "
                << serialize_hypergraph(hit.instance, Format::json) << '\n';
      nlohmann::ordered_json row;
      row["counter"] = hit.counter;
      row["instance_seed"] = hit.instance_seed;
      row["instance"] = nlohmann::ordered_json::parse(
          serialize_hypergraph(hit.instance, Format::json));
      hits.push_back(std::move(row));
    }
    write_file_atomic(fs::path(output), hits.dump(2) + "\n");
    std::cout << res.hits.size() << " hits written to " << output << '\n';
  }
  if (!res.reached_target) {
    std::cerr << "attempt budget exhausted before examining " << samples
              << " surplus-3 instances\n";
    return 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-ratio degrees and matching bounds for 4-uniform "
               "set systems"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  int exit_code = 0;

  InputOpts deg_in;
  double deg_timeout = 60.0;
  bool deg_json = false;
  CLI::App* deg = app.add_subcommand("degree", "cross-ratio degree");
  add_input_opts(deg, deg_in);
  deg->add_option("--timeout", deg_timeout, "budget in seconds")
      ->capture_default_str();
  deg->add_flag("--json", deg_json, "machine-readable output");
  deg->callback([&] { exit_code = run_degree(deg_in, deg_timeout, deg_json); });

  InputOpts bnd_in;
  std::vector<int> bnd_triple;
  bool bnd_json = false;
  CLI::App* bnd = app.add_subcommand(
      "bound", "matching bound: permanent minimised over vertex triples");
  add_input_opts(bnd, bnd_in);
  bnd->add_option("--triple", bnd_triple,
                  "evaluate at one triple a,b,c instead of the minimum")
      ->delimiter(',')
      ->expected(3);
  bnd->add_flag("--json", bnd_json, "machine-readable output");
  bnd->callback([&] { exit_code = run_bound(bnd_in, bnd_triple, bnd_json); });

  InputOpts sur_in;
  bool sur_json = false;
  CLI::App* sur = app.add_subcommand(
      "surplus", "minimum neighbourhood surplus over edge subsets");
  add_input_opts(sur, sur_in);
  sur->add_flag("--json", sur_json, "machine-readable output");
  sur->callback([&] { exit_code = run_surplus(sur_in, sur_json); });

  InputOpts ver_in;
  std::vector<int> ver_triple;
  double ver_timeout = 60.0;
  bool ver_json = false;
  CLI::App* ver = app.add_subcommand(
      "verify", "cross-check every bound method against the degree");
  add_input_opts(ver, ver_in);
  ver->add_option("--triple", ver_triple, "restrict the report to one triple")
      ->delimiter(',')
      ->expected(3);
  ver->add_option("--timeout", ver_timeout, "degree budget in seconds")
      ->capture_default_str();
  ver->add_flag("--json", ver_json, "machine-readable output");
  ver->callback([&] {
    exit_code = run_verify(ver_in, ver_triple, ver_timeout, ver_json);
  });

  ExperimentOpts exp;
  CLI::App* expc = app.add_subcommand(
      "experiment", "sample random instances, compare degree to bound");
  expc->add_option("--n", exp.cfg.n, "vertex count")->capture_default_str();
  expc->add_option("--samples", exp.cfg.samples, "accepted sample target")
      ->required();
  expc->add_option("--seed", exp.cfg.seed, "run seed")->capture_default_str();
  expc->add_option("--filter", exp.filter, "instance filter")
      ->check(CLI::IsMember({"bound_positive", "none"}))
      ->capture_default_str();
  expc->add_option("--max-attempts", exp.cfg.max_attempts,
                   "attempt cap, 0 = samples*1000");
  expc->add_option("--parallelism", exp.cfg.parallelism,
                   "worker threads, 0 = XRATIO_THREADS or hardware");
  expc->add_option("--timeout", exp.timeout_seconds,
                   "per-instance degree budget in seconds")
      ->capture_default_str();
  expc->add_option("--histogram", exp.histogram, "also write a gap histogram")
      ->check(CLI::IsMember({"text", "svg"}));
  expc->add_option("-o,--output", exp.output, "CSV path; summary goes next to it")
      ->capture_default_str();
  expc->callback([&] { exit_code = run_experiment_cmd(exp); });

  int sch_n = 10;
  std::uint64_t sch_samples = 0, sch_seed = 0, sch_max = 0;
  std::string sch_output = "counterexamples.json";
  CLI::App* sch = app.add_subcommand(
      "search", "hunt for surplus-3 instances of degree zero");
  sch->add_option("--n", sch_n, "vertex count")->capture_default_str();
  sch->add_option("--samples", sch_samples, "surplus-3 instances to examine")
      ->required();
  sch->add_option("--seed", sch_seed, "run seed")->capture_default_str();
  sch->add_option("--max-attempts", sch_max, "attempt cap, 0 = samples*1000");
  sch->add_option("-o,--output", sch_output, "where hits are written")
      ->capture_default_str();
  sch->callback([&] {
    exit_code = run_search(sch_n, sch_samples, sch_seed, sch_max, sch_output);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Timeout& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return exit_code;
}
