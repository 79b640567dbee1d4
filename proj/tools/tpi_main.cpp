// Command-line front end: closed-form dips, fringe patterns, eraser
// channels, duality sweeps and event sampling, written as CSV or JSON.
//
// Exit codes: 0 success, 1 runtime failure, 2 configuration error.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "tpi/tpi.hpp"

namespace {

using tpi::ExchangeSign;
using tpi::InternalState;
using tpi::make_state;

/// Anything wrong with the requested configuration, as opposed to a
/// failure while computing it.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) { return tpi::report::format_number(v); }

struct TagOpts {
  double overlap = 1.0;
  double theta = 0.0;
  double phi = 0.0;
  CLI::Option* overlap_opt = nullptr;
  CLI::Option* theta_opt = nullptr;
  CLI::Option* phi_opt = nullptr;

  void attach(CLI::App* cmd) {
    overlap_opt = cmd->add_option("--overlap", overlap,
                                  "Tag overlap modulus |<dA|dB>| in [0,1]")
                      ->check(CLI::Range(0.0, 1.0));
    theta_opt = cmd->add_option(
        "--theta", theta, "Bloch polar angle of tag dB (dA is pinned to the pole)");
    phi_opt = cmd->add_option("--phi", phi, "Bloch azimuth of tag dB");
  }

  std::pair<InternalState, InternalState> resolve() const {
    const bool by_overlap = overlap_opt->count() > 0;
    const bool by_angle = theta_opt->count() > 0 || phi_opt->count() > 0;
    if (by_overlap == by_angle) {
      throw ConfigError(
          "specify the tags with exactly one of --overlap or --theta/--phi");
    }
    const InternalState dA = make_state(0.0, 0.0);
    const InternalState dB = by_overlap
                                 ? make_state(2.0 * std::acos(overlap), 0.0)
                                 : make_state(theta, phi);
    return {dA, dB};
  }
};

struct PacketOpts {
  double eps = 1.0;
  double x0 = 10.0;
  double delta = 200.0;
  double time = 100.0;
  double mass = 1.0;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* time_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--eps", eps, "Initial packet width");
    cmd->add_option("--x0", x0, "Source half-separation");
    delta_opt =
        cmd->add_option("--delta", delta, "Spreading scale 2t/m (default 200)");
    time_opt = cmd->add_option("--time", time, "Flight time (with --mass)");
    cmd->add_option("--mass", mass, "Particle mass (default 1)");
  }

  tpi::hbt::WavepacketConfig resolve() const {
    if (delta_opt->count() > 0 && time_opt->count() > 0) {
      throw ConfigError("give --delta or --time/--mass, not both");
    }
    try {
      if (time_opt->count() > 0) {
        return tpi::hbt::WavepacketConfig(x0, eps, mass, time);
      }
      return tpi::hbt::WavepacketConfig::with_delta(x0, eps, delta, mass);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

struct EtaOpt {
  std::string value = "+1";

  void attach(CLI::App* cmd) {
    cmd->add_option("--eta", value, "Exchange sign: +1 bosons, -1 fermions")
        ->check(CLI::IsMember({"+1", "1", "-1"}));
  }

  ExchangeSign resolve() const {
    return value == "-1" ? ExchangeSign::fermions : ExchangeSign::bosons;
  }
};

struct OutOpts {
  std::string path;
  std::string format = "csv";
  CLI::Option* out_opt = nullptr;

  void attach(CLI::App* cmd, bool required = false) {
    out_opt = cmd->add_option("--out", path, "Output file path");
    if (required) out_opt->required();
    cmd->add_option("--format", format, "Output format (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));
  }

  bool wanted() const { return out_opt->count() > 0; }
  tpi::report::Format fmt() const { return tpi::report::parse_format(format); }
};

// ---------------------------------------------------------------------------

struct HomCmd {
  TagOpts tags;
  EtaOpt exchange;
  OutOpts out;
  double sigma_t = 1.0;
  double tau_max = 0.0;
  int points = 201;
  CLI::Option* sigma_opt = nullptr;

  void attach(CLI::App* cmd) {
    tags.attach(cmd);
    exchange.attach(cmd);
    out.attach(cmd);
    sigma_opt = cmd->add_option(
        "--sigma-t", sigma_t, "Temporal packet width; enables the delay scan");
    cmd->add_option("--tau-max", tau_max,
                    "Delay scan half-range (default 5 sigma-t)");
    cmd->add_option("--points", points, "Delay scan sample count")
        ->check(CLI::Range(2, 1000000));
  }

  int run() const {
    const auto [dA, dB] = tags.resolve();
    const ExchangeSign x = exchange.resolve();
    const double pc = tpi::hom::coincidence_probability(dA, dB, x);
    const double v = tpi::hom::hom_visibility(dA, dB);
    const double d = tpi::distinguishability(dA, dB);
    std::cout << "P_C=" << fmt(pc) << " V=" << fmt(v) << " D=" << fmt(d)
              << " D+V=" << fmt(d + v) << "\n";

    if (sigma_opt->count() > 0) {
      const double half = tau_max > 0.0 ? tau_max : 5.0 * sigma_t;
      std::vector<double> taus(points);
      for (int i = 0; i < points; ++i) {
        taus[i] = -half + 2.0 * half * i / (points - 1);
      }
      const auto scan = tpi::hom::delay_scan(dA, dB, sigma_t, taus);
      if (out.wanted()) {
        std::string body;
        if (out.fmt() == tpi::report::Format::csv) {
          body = "tau,coincidence\n";
          for (const auto& [tau, c] : scan) {
            body += fmt(tau) + "," + fmt(c) + "\n";
          }
        } else {
          body = "[\n";
          for (std::size_t i = 0; i < scan.size(); ++i) {
            body += "  {\"tau\": " + fmt(scan[i].first) +
                    ", \"coincidence\": " + fmt(scan[i].second) + "}";
            body += i + 1 < scan.size() ? ",\n" : "\n";
          }
          body += "]\n";
        }
        tpi::report::write_file_atomic(out.path, body);
      }
      return 0;
    }

    if (out.wanted()) {
      const auto rec =
          tpi::duality::duality_check(dA, dB, tpi::duality::Experiment::hom);
      tpi::report::emit_records({rec}, out.path, out.fmt());
    }
    return 0;
  }
};

struct HbtCmd {
  TagOpts tags;
  EtaOpt exchange;
  PacketOpts packet;
  OutOpts out;
  int periods = 3;
  int samples_per_period = 50;

  void attach(CLI::App* cmd) {
    tags.attach(cmd);
    exchange.attach(cmd);
    packet.attach(cmd);
    out.attach(cmd);
    cmd->add_option("--periods", periods, "Fringe periods in the pattern")
        ->check(CLI::Range(1, 1000));
    cmd->add_option("--samples-per-period", samples_per_period,
                    "Pattern samples per period (even)")
        ->check(CLI::Range(4, 10000));
  }

  int run() const {
    const auto [dA, dB] = tags.resolve();
    const auto cfg = packet.resolve();
    const double s = tpi::overlap(dA, dB).modulus;
    const tpi::hbt::AnalyticJointDensity model(cfg, exchange.resolve(), s);
    const auto pattern =
        tpi::hbt::fringe_pattern(model, periods, samples_per_period);
    const double v = tpi::hbt::extract_visibility(pattern);
    const double d = tpi::distinguishability(dA, dB);
    std::cout << "V=" << fmt(v) << " D=" << fmt(d) << " D+V=" << fmt(d + v)
              << " period=" << fmt(pattern.fringe_period) << "\n";
    if (out.wanted()) {
      tpi::report::emit_pattern(pattern, out.path, out.fmt());
    }
    return 0;
  }
};

struct EraserCmd {
  TagOpts tags;
  EtaOpt exchange;
  PacketOpts packet;
  OutOpts out;
  std::string channel = "erased";

  void attach(CLI::App* cmd) {
    tags.attach(cmd);
    exchange.attach(cmd);
    packet.attach(cmd);
    out.attach(cmd);
    cmd->add_option("--channel", channel,
                    "Which pattern goes to --out (default erased)")
        ->check(CLI::IsMember({"raw", "erased", "anti"}));
  }

  int run() const {
    const auto [dA, dB] = tags.resolve();
    const auto cfg = packet.resolve();
    const ExchangeSign x = exchange.resolve();
    const double s = tpi::overlap(dA, dB).modulus;

    // Analyzer basis along the symmetric superposition of the tags; the
    // anti channel is its orthocomplement on detector 2.
    const InternalState e_sym = tpi::superpose(dA, dB, {1.0, 0.0}, {1.0, 0.0});
    const InternalState e_anti = tpi::orthocomplement(e_sym);

    const tpi::hbt::AnalyticJointDensity model(cfg, x, s);
    const auto raw = tpi::hbt::fringe_pattern(model);
    const auto erased =
        tpi::hbt::eraser_fringe_pattern(cfg, x, dA, dB, e_sym, e_sym);
    const auto anti =
        tpi::hbt::eraser_fringe_pattern(cfg, x, dA, dB, e_sym, e_anti);

    const double joint_same = tpi::hom::eraser_joint_probability(dA, dB, e_sym, e_sym);
    const double joint_anti = tpi::hom::eraser_joint_probability(dA, dB, e_sym, e_anti);

    std::cout << "V_raw=" << fmt(tpi::hbt::extract_visibility(raw))
              << " V_erased=" << fmt(tpi::hbt::extract_visibility(erased))
              << " V_anti=" << fmt(tpi::hbt::extract_visibility(anti))
              << " hom_joint_erased=" << fmt(joint_same)
              << " hom_joint_anti=" << fmt(joint_anti) << "\n";

    if (out.wanted()) {
      const auto& chosen =
          channel == "raw" ? raw : (channel == "anti" ? anti : erased);
      tpi::report::emit_pattern(chosen, out.path, out.fmt());
    }
    return 0;
  }
};

struct DualityCmd {
  EtaOpt exchange;
  PacketOpts packet;
  OutOpts out;
  std::string experiment = "hom";
  int points = 101;
  std::uint64_t events = 100000;
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    exchange.attach(cmd);
    packet.attach(cmd);
    out.attach(cmd);
    cmd->add_option("--experiment", experiment, "Visibility source")
        ->check(CLI::IsMember({"hom", "hbt-analytic", "hbt-sampled"}));
    cmd->add_option("--points", points, "Sweep points over s in [0,1]")
        ->check(CLI::Range(2, 100000));
    cmd->add_option("--events", events, "Events per point (sampled sweeps)");
    cmd->add_option("--seed", seed, "Master seed (sampled sweeps)");
  }

  int run() const {
    tpi::duality::Experiment ex = tpi::duality::Experiment::hom;
    if (experiment == "hbt-analytic") ex = tpi::duality::Experiment::hbt_analytic;
    if (experiment == "hbt-sampled") ex = tpi::duality::Experiment::hbt_sampled;

    tpi::duality::SamplingPlan plan{packet.resolve(), exchange.resolve(), events,
                                    seed};
    const auto records = tpi::duality::duality_sweep(points, ex, plan);

    double max_residual = 0.0;
    double max_sigmas = 0.0;
    for (const auto& r : records) {
      max_residual = std::max(max_residual, r.residual);
      if (r.std_error > 0.0) {
        max_sigmas = std::max(max_sigmas, r.residual / r.std_error);
      }
    }
    std::cout << "experiment=" << tpi::duality::to_label(ex)
              << " points=" << points << " max_residual=" << fmt(max_residual);
    if (ex == tpi::duality::Experiment::hbt_sampled) {
      std::cout << " max_residual_in_se=" << fmt(max_sigmas);
    }
    std::cout << "\n";

    if (out.wanted()) {
      tpi::report::emit_records(records, out.path, out.fmt());
    }
    return 0;
  }
};

struct SampleCmd {
  TagOpts tags;
  EtaOpt exchange;
  PacketOpts packet;
  OutOpts out;
  std::string experiment = "hom";
  std::uint64_t events = 100000;
  std::uint64_t seed = 1;

  void attach(CLI::App* cmd) {
    tags.attach(cmd);
    exchange.attach(cmd);
    packet.attach(cmd);
    out.attach(cmd, /*required=*/true);
    cmd->add_option("--experiment", experiment, "Which experiment to sample")
        ->check(CLI::IsMember({"hom", "hbt"}));
    cmd->add_option("--events", events, "Number of events");
    cmd->add_option("--seed", seed, "Batch seed");
  }

  int run() const {
    const auto [dA, dB] = tags.resolve();
    if (experiment == "hom") {
      const auto batch = tpi::sampling::sample_hom(dA, dB, events, seed);
      const double frac =
          static_cast<double>(tpi::sampling::count_outcome(
              batch, tpi::sampling::HomOutcome::coincidence)) /
          static_cast<double>(batch.count);
      std::cout << "events=" << batch.count
                << " coincidence_fraction=" << fmt(frac) << "\n";
      tpi::report::emit_batch(batch, out.path, out.fmt());
      return 0;
    }
    const auto cfg = packet.resolve();
    const double s = tpi::overlap(dA, dB).modulus;
    const auto batch =
        tpi::sampling::sample_hbt(cfg, exchange.resolve(), s, events, seed);
    std::cout << "events=" << batch.count
              << " acceptance_rate=" << fmt(batch.acceptance_rate);
    if (batch.count >= 10000) {
      const auto est = tpi::sampling::estimate_visibility(batch, cfg);
      std::cout << " V_est=" << fmt(est.visibility)
                << " std_error=" << fmt(est.std_error);
    }
    std::cout << "\n";
    tpi::report::emit_batch(batch, out.path, out.fmt());
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two-particle interference: dip and fringe laws, duality sweeps, "
      "event sampling"};
  app.require_subcommand(1);

  HomCmd hom_cmd;
  HbtCmd hbt_cmd;
  EraserCmd eraser_cmd;
  DualityCmd duality_cmd;
  SampleCmd sample_cmd;

  CLI::App* hom_sub = app.add_subcommand(
      "hom", "Closed-form dip, visibility, optional delay scan");
  hom_cmd.attach(hom_sub);
  CLI::App* hbt_sub =
      app.add_subcommand("hbt", "Analytic fringe pattern and visibility");
  hbt_cmd.attach(hbt_sub);
  CLI::App* eraser_sub = app.add_subcommand(
      "eraser", "Post-selected fringe channels and their contrast");
  eraser_cmd.attach(eraser_sub);
  CLI::App* duality_sub =
      app.add_subcommand("duality", "Sweep of D + V over the overlap");
  duality_cmd.attach(duality_sub);
  CLI::App* sample_sub =
      app.add_subcommand("sample", "Event-level Monte Carlo batches");
  sample_cmd.attach(sample_sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (hom_sub->parsed()) return hom_cmd.run();
    if (hbt_sub->parsed()) return hbt_cmd.run();
    if (eraser_sub->parsed()) return eraser_cmd.run();
    if (duality_sub->parsed()) return duality_cmd.run();
    if (sample_sub->parsed()) return sample_cmd.run();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
