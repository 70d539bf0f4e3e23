#include "commands.hpp"

#include <chrono>
#include <exception>
#include <ostream>

#include "fdrsel/config.hpp"
#include "fdrsel/error.hpp"
#include "fdrsel/io.hpp"
#include "fdrsel/parallel.hpp"
#include "fdrsel/preprocess.hpp"
#include "fdrsel/simulation.hpp"

namespace fdrsel::cli {

namespace fs = std::filesystem;

int run_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  try {
    GridConfig config = parse_config(args.config);
    if (!args.out.empty()) config.out_dir = args.out.string();
    if (config.out_dir.empty()) throw InvalidParameter("out: no output directory (use --out)");
    config.validate(args.full_scale);
    set_threads(args.threads);

    const fs::path dir = config.out_dir;
    fs::create_directories(dir);
    // A stale summary from an earlier run must not survive a failed one.
    fs::remove(dir / "summary.csv");

    const auto scenarios = config.scenarios();
    out << "running " << scenarios.size() << " scenarios x " << config.replications
        << " replications x " << config.methods.size() << " methods\n";
    const auto start = std::chrono::steady_clock::now();
    const GridResult result = run_grid(config, args.serial ? Execution::Serial : Execution::Parallel);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto reports = summarize(result);

    write_file_atomic(dir / "config.resolved", render_config(config));
    write_file_atomic(dir / "replications.csv", replications_csv(result));
    const std::string table = summary_table(reports);
    write_file_atomic(dir / "summary.txt", table);
    write_file_atomic(dir / "summary.csv", summary_csv(reports));

    std::size_t failed = 0;
    for (const auto& r : reports) failed += r.failed;
    out << table << "elapsed " << secs << " s";
    if (failed) out << ", " << failed << " failed replications (see replications.csv)";
    out << "\nwrote " << dir.string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "simulate: " << e.what() << "\n";
    return 1;
  }
}

int run_select(const SelectArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.out.empty()) throw InvalidParameter("--out is required");
    if (!(args.q > 0.0 && args.q < 1.0)) throw InvalidParameter("--q must lie in (0, 1)");
    const Method method = parse_method(args.method);
    const LoadedData loaded = to_dataset(read_delimited(args.data), args.response);
    const Dataset& d = loaded.data;
    const auto& names = loaded.feature_names;
    set_threads(args.threads);

    try {
      (void)standardize(d.x);
    } catch (const DegenerateColumn& e) {
      throw InvalidParameter("feature '" + names[e.column()] + "' has zero variance");
    }

    SelectionOutcome o;
    switch (method) {
      case Method::Dss:
      case Method::Mss: {
        MethodSettings s;
        s.estimator = parse_estimator(args.estimator);
        s.tau = parse_tau_rule(args.tau);
        if (s.tau.kind == TauRule::Kind::OraclePercentile && !s.tau.null_sd)
          throw InvalidParameter("--tau oracle needs an explicit null sd on real data (oracle:<level>:<sd>)");
        s.k = args.k;
        s.k_prime = args.k_prime;
        s.bootstrap = args.bootstrap;
        o = run_method(method, d, args.q, s, args.seed, Execution::Parallel);
        break;
      }
      case Method::Bh:
        if (d.rows() <= d.cols() + 1)
          throw InvalidParameter("bh needs OLS p-values, which require n > p + 1 (n = " +
                                 std::to_string(d.rows()) + ", p = " + std::to_string(d.cols()) + ")");
        o = bh_dataset_select(d, args.q);
        break;
      case Method::Ss: {
        MethodSettings s;
        s.ss_threshold = args.ss_threshold;
        s.ss_subsamples = args.ss_subsamples;
        o = run_method(method, d, args.q, s, args.seed, Execution::Parallel);
        break;
      }
    }

    fs::create_directories(args.out);
    write_file_atomic(args.out / "selected.csv", selected_csv(o, names));
    if (method == Method::Dss || method == Method::Mss)
      out << "T = " << format_double(o.threshold) << "\ntau = " << format_double(o.tau) << "\n";
    out << "|S| = " << o.selected.size() << "\n";
    for (std::size_t j : o.selected) out << "  " << names[j] << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "select: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fdrsel::cli
