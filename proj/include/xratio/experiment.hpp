#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "xratio/core.hpp"
#include "xratio/degree.hpp"
#include "xratio/matching.hpp"

namespace xratio {

enum class SampleFilter { bound_positive, none };

struct ExperimentConfig {
  int n = 10;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  SampleFilter filter = SampleFilter::bound_positive;
  std::uint64_t max_attempts = 0;  // 0 defaults to samples * 1000
  int parallelism = 0;             // 0 defaults to XRATIO_THREADS or hardware
  std::chrono::milliseconds instance_timeout{60000};
};

struct ExperimentRecord {
  std::uint64_t counter = 0;
  std::uint64_t instance_seed = 0;
  int n = 0;
  std::string edges;  // canonical edge list, "a b c d" joined by ';'
  std::uint64_t degree = 0;
  std::uint64_t min_bound = 0;
  std::int64_t delta = 0;  // degree - min_bound, never positive
  int surplus = 0;
  std::int64_t degree_micros = 0;
  std::int64_t bound_micros = 0;
};

struct ExperimentSummary {
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;
  std::uint64_t rejected = 0;
  std::uint64_t skipped = 0;  // per-instance timeouts
  double tight_fraction = 0.0;
  double mean_degree = 0.0;
  std::map<std::uint64_t, std::uint64_t> delta_histogram;  // key is -delta
  double wall_time_seconds = 0.0;
};

struct ExperimentResult {
  std::vector<ExperimentRecord> records;
  ExperimentSummary summary;
  bool reached_target = false;
};

inline int resolve_parallelism(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("XRATIO_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

inline std::string edges_field(const Hypergraph& h) {
  std::vector<Edge> es = h.edges();
  std::sort(es.begin(), es.end());
  std::ostringstream os;
  for (std::size_t i = 0; i < es.size(); ++i) {
    if (i) os << ';';
    os << es[i][0] << ' ' << es[i][1] << ' ' << es[i][2] << ' ' << es[i][3];
  }
  return os.str();
}

// accepted/tight/mean/histogram are functions of the records alone, so a
// re-aggregation pass over the CSV can always reproduce them
inline ExperimentSummary summarize_records(const std::vector<ExperimentRecord>& rs) {
  ExperimentSummary s;
  s.accepted = rs.size();
  std::uint64_t degree_sum = 0;
  for (const ExperimentRecord& r : rs) {
    ++s.delta_histogram[static_cast<std::uint64_t>(-r.delta)];
    degree_sum += r.degree;
  }
  if (s.accepted) {
    const auto it = s.delta_histogram.find(0);
    s.tight_fraction = it == s.delta_histogram.end()
                           ? 0.0
                           : static_cast<double>(it->second) /
                                 static_cast<double>(s.accepted);
    s.mean_degree = static_cast<double>(degree_sum) / static_cast<double>(s.accepted);
  }
  return s;
}

namespace detail {

enum class AttemptStatus { accepted, rejected, skipped };

struct Attempt {
  AttemptStatus status = AttemptStatus::rejected;
  ExperimentRecord record;
};

inline Attempt evaluate_attempt(const ExperimentConfig& cfg, std::uint64_t counter) {
  using clock = std::chrono::steady_clock;
  Attempt a;
  a.record.counter = counter;
  a.record.instance_seed = mix_seed(cfg.seed, counter);
  a.record.n = cfg.n;
  const Hypergraph h = random_hypergraph(cfg.n, a.record.instance_seed);

  const auto t0 = clock::now();
  const BoundReport rep = min_matching_bound(h);  // cross-checks the surplus
  a.record.bound_micros =
      std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t0).count();
  if (cfg.filter == SampleFilter::bound_positive && rep.min_bound == 0) {
    a.status = AttemptStatus::rejected;
    return a;
  }

  const auto t1 = clock::now();
  std::uint64_t degree = 0;
  try {
    degree = cross_ratio_degree(h, cfg.instance_timeout);
  } catch (const Timeout&) {
    a.status = AttemptStatus::skipped;
    return a;
  }
  a.record.degree_micros =
      std::chrono::duration_cast<std::chrono::microseconds>(clock::now() - t1).count();

  a.record.edges = edges_field(h);
  a.record.degree = degree;
  a.record.min_bound = rep.min_bound;
  a.record.delta = static_cast<std::int64_t>(degree) -
                   static_cast<std::int64_t>(rep.min_bound);
  a.record.surplus = rep.surplus;
  if (a.record.delta > 0)
    throw std::logic_error(
        "degree exceeds the matching bound on instance seed " +
        std::to_string(a.record.instance_seed) + ": counterexample or bug");
  a.status = AttemptStatus::accepted;
  return a;
}

// evaluates counters [lo, hi) into slots, preserving counter order; worker
// exceptions are re-thrown in counter order so runs stay deterministic
inline void evaluate_range(const ExperimentConfig& cfg, std::uint64_t lo,
                           std::uint64_t hi, int workers,
                           std::vector<Attempt>& out) {
  out.assign(static_cast<std::size_t>(hi - lo), Attempt{});
  std::vector<std::exception_ptr> errors(out.size());
  if (workers <= 1) {
    for (std::uint64_t c = lo; c < hi; ++c) {
      try {
        out[static_cast<std::size_t>(c - lo)] = evaluate_attempt(cfg, c);
      } catch (...) {
        errors[static_cast<std::size_t>(c - lo)] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::uint64_t> next{lo};
    auto work = [&] {
      for (;;) {
        const std::uint64_t c = next.fetch_add(1);
        if (c >= hi) return;
        try {
          out[static_cast<std::size_t>(c - lo)] = evaluate_attempt(cfg, c);
        } catch (...) {
          errors[static_cast<std::size_t>(c - lo)] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    const int count = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(workers), hi - lo));
    pool.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);
}

inline void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n < 5 || cfg.n > 32)
    throw std::invalid_argument("experiment needs n in [5,32]");
  if (cfg.samples == 0) throw std::invalid_argument("samples must be positive");
  if (cfg.max_attempts && cfg.max_attempts < cfg.samples)
    throw std::invalid_argument("max_attempts must be at least samples");
  if (cfg.instance_timeout.count() < 0)
    throw std::invalid_argument("instance timeout must be nonnegative");
}

}  // namespace detail

// Draws instances at counter-derived seeds until `samples` are accepted or
// the attempt budget runs out. Acceptance, records, and summary counters
// depend only on (n, samples, seed, filter, max_attempts, timeout): chunks
// are assembled in counter order, so parallelism never changes the output.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  detail::validate_config(cfg);
  const std::uint64_t max_attempts =
      cfg.max_attempts ? cfg.max_attempts : cfg.samples * 1000;
  const int workers = resolve_parallelism(cfg.parallelism);
  const auto t_start = std::chrono::steady_clock::now();

  ExperimentResult res;
  std::uint64_t next_counter = 0;
  const std::uint64_t chunk =
      std::max<std::uint64_t>(static_cast<std::uint64_t>(workers) * 4, 16);
  std::vector<detail::Attempt> slots;
  std::uint64_t attempts = 0, rejected = 0, skipped = 0;

  while (res.records.size() < cfg.samples && next_counter < max_attempts) {
    const std::uint64_t hi = std::min(max_attempts, next_counter + chunk);
    detail::evaluate_range(cfg, next_counter, hi, workers, slots);
    for (const detail::Attempt& a : slots) {
      attempts = a.record.counter + 1;
      switch (a.status) {
        case detail::AttemptStatus::accepted:
          res.records.push_back(a.record);
          break;
        case detail::AttemptStatus::rejected:
          ++rejected;
          break;
        case detail::AttemptStatus::skipped:
          ++skipped;
          break;
      }
      if (res.records.size() == cfg.samples) break;
    }
    next_counter = hi;
  }

  res.summary = summarize_records(res.records);
  res.summary.attempts = attempts;
  res.summary.rejected = rejected;
  res.summary.skipped = skipped;
  res.summary.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  res.reached_target = res.records.size() == cfg.samples;
  return res;
}

struct SearchHit {
  std::uint64_t counter = 0;
  std::uint64_t instance_seed = 0;
  Hypergraph instance{3, {}};
};

struct SearchResult {
  std::vector<SearchHit> hits;
  std::uint64_t attempts = 0;  // counters consumed
  std::uint64_t examined = 0;  // instances with surplus 3
  bool reached_target = false;
};

// Hunts for an instance with surplus 3 but degree 0; none is expected to
// exist. Any candidate is re-verified through the bound report and a fresh
// degree run before being reported.
inline SearchResult search_sigma3_zero_degree(int n, std::uint64_t samples,
                                              std::uint64_t seed,
                                              std::uint64_t max_attempts = 0) {
  if (n < 5 || n > 32) throw std::invalid_argument("search needs n in [5,32]");
  if (samples == 0) throw std::invalid_argument("samples must be positive");
  if (!max_attempts) max_attempts = samples * 1000;
  if (max_attempts < samples)
    throw std::invalid_argument("max_attempts must be at least samples");

  SearchResult res;
  for (std::uint64_t counter = 0;
       res.examined < samples && counter < max_attempts; ++counter) {
    res.attempts = counter + 1;
    const std::uint64_t instance_seed = mix_seed(seed, counter);
    const Hypergraph h = random_hypergraph(n, instance_seed);
    if (surplus(h) != 3) continue;
    ++res.examined;
    if (cross_ratio_degree(h) != 0) continue;
    const BoundReport rep = min_matching_bound(h);
    if (rep.surplus != 3 || rep.min_bound == 0 || cross_ratio_degree(h) != 0)
      throw std::logic_error("search self-check disagreed on instance seed " +
                             std::to_string(instance_seed));
    res.hits.push_back(SearchHit{counter, instance_seed, h});
  }
  res.reached_target = res.examined == samples;
  return res;
}

enum class HistogramFormat { text, svg };

inline std::string render_histogram(const ExperimentSummary& s, HistogramFormat f) {
  if (s.accepted == 0)
    throw std::invalid_argument("histogram needs at least one accepted sample");
  const std::uint64_t max_key =
      s.delta_histogram.empty() ? 0 : s.delta_histogram.rbegin()->first;
  std::uint64_t max_count = 1;
  for (const auto& [k, c] : s.delta_histogram) max_count = std::max(max_count, c);

  const auto count_of = [&](std::uint64_t k) {
    const auto it = s.delta_histogram.find(k);
    return it == s.delta_histogram.end() ? 0ull : it->second;
  };

  if (f == HistogramFormat::text) {
    std::ostringstream os;
    os << "gap histogram (bucket k holds instances with bound - degree = k)\n";
    for (std::uint64_t k = 0; k <= max_key; ++k) {
      const std::uint64_t c = count_of(k);
      const int width = c == 0
                            ? 0
                            : std::max<int>(1, static_cast<int>(std::llround(
                                                   40.0 * static_cast<double>(c) /
                                                   static_cast<double>(max_count))));
      os << std::setw(4) << k << " |" << std::setw(7) << c << ' ';
      for (int i = 0; i < width; ++i) os << '#';
      os << '\n';
    }
    return os.str();
  }

  // svg: one bar per bucket, count labels above, bucket labels below
  const int bar_w = 34, gap = 10, left = 24, top = 18, plot_h = 160, bottom = 26;
  const int width = left * 2 + static_cast<int>(max_key + 1) * (bar_w + gap);
  const int height = top + plot_h + bottom;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
     << "\">\n";
  os << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\"/>\n";
  for (std::uint64_t k = 0; k <= max_key; ++k) {
    const std::uint64_t c = count_of(k);
    const int h = static_cast<int>(std::llround(
        static_cast<double>(plot_h) * static_cast<double>(c) /
        static_cast<double>(max_count)));
    const int x = left + static_cast<int>(k) * (bar_w + gap);
    const int y = top + plot_h - h;
    os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w
       << "\" height=\"" << h << "\" fill=\"#4477aa\"/>\n";
    os << "  <text x=\"" << x + bar_w / 2 << "\" y=\"" << y - 4
       << "\" font-size=\"11\" text-anchor=\"middle\">" << c << "</text>\n";
    os << "  <text x=\"" << x + bar_w / 2 << "\" y=\"" << top + plot_h + 16
       << "\" font-size=\"11\" text-anchor=\"middle\">" << k << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline std::string experiment_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream os;
  os << "counter,instance_seed,n,edges,degree,min_bound,delta,surplus,"
        "degree_micros,bound_micros\n";
  for (const ExperimentRecord& r : records)
    os << r.counter << ',' << r.instance_seed << ',' << r.n << ',' << r.edges
       << ',' << r.degree << ',' << r.min_bound << ',' << r.delta << ','
       << r.surplus << ',' << r.degree_micros << ',' << r.bound_micros << '\n';
  return os.str();
}

inline std::string summary_json(const ExperimentConfig& cfg,
                                const ExperimentSummary& s) {
  nlohmann::ordered_json j;
  j["version"] = std::string(kVersion);
  j["config"]["n"] = cfg.n;
  j["config"]["samples"] = cfg.samples;
  j["config"]["seed"] = cfg.seed;
  j["config"]["filter"] =
      cfg.filter == SampleFilter::bound_positive ? "bound_positive" : "none";
  j["config"]["max_attempts"] = cfg.max_attempts ? cfg.max_attempts : cfg.samples * 1000;
  j["config"]["instance_timeout_ms"] = cfg.instance_timeout.count();
  j["accepted"] = s.accepted;
  j["attempts"] = s.attempts;
  j["rejected"] = s.rejected;
  j["skipped"] = s.skipped;
  j["tight_fraction"] = s.tight_fraction;
  j["mean_degree"] = s.mean_degree;
  auto& hist = j["delta_histogram"] = nlohmann::ordered_json::object();
  for (const auto& [k, c] : s.delta_histogram) hist[std::to_string(k)] = c;
  j["wall_time_seconds"] = s.wall_time_seconds;
  return j.dump(2) + "\n";
}

// temp-plus-rename so readers never observe a half-written file
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw IoError("cannot rename " + tmp.string() + " to " + path.string() +
                  ": " + ec.message());
  }
}

}  // namespace xratio
