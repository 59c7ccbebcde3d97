// Command-line front end: ingestion, tail fitting, composite-model shares,
// diagnostics, Monte Carlo benchmarking, and a synthetic-data generator.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wealthtail/csv.hpp"
#include "wealthtail/reports.hpp"
#include "wealthtail/synth.hpp"
#include "wealthtail/version.hpp"

namespace wt = wealthtail;

namespace {

struct CommonIo {
  std::string out;
  std::string format = "json";
};

void add_io_flags(CLI::App* cmd, CommonIo& io) {
  cmd->add_option("--out", io.out, "Output file (default: stdout)");
  cmd->add_option("--format", io.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

void emit(const CommonIo& io, const wt::json& payload, const std::string& csv) {
  const std::string text =
      io.format == "json" ? payload.dump(2) + "\n" : csv;
  if (io.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(io.out);
    if (!file) throw wt::validation_error("cannot write " + io.out);
    file << text;
  }
}

std::optional<double> parse_currency_opt(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return wt::parse_currency(text);
}

struct RichFlags {
  std::string path;
  std::string w1;
  std::string w1_scale;
};

void add_rich_flags(CLI::App* cmd, RichFlags& flags) {
  cmd->add_option("--richlist", flags.path, "Rich-list CSV (wealth,households)");
  cmd->add_option("--w1", flags.w1,
                  "Rich-list counting threshold (default: smallest listed wealth)");
  cmd->add_option("--w1-scale", flags.w1_scale,
                  "Threshold used inside w1^alpha factors (default: --w1)");
}

std::optional<wt::RichList> load_rich(const RichFlags& flags) {
  if (flags.path.empty()) return std::nullopt;
  return wt::load_richlist_csv(flags.path, parse_currency_opt(flags.w1),
                               parse_currency_opt(flags.w1_scale));
}

int payload_exit(bool complete) { return complete ? 0 : 1; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pareto tail fitting and top wealth shares for weighted survey data"};
  app.set_version_flag("--version", wt::library_version);
  app.require_subcommand(1);

  try {
    // ---- synth ----------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate a synthetic survey file");
    wt::SynthConfig synth_config;
    std::string synth_out, synth_rich_out;
    std::string synth_tail_start = "1M", synth_body_median = "150k",
                synth_top_code;
    std::size_t synth_rich_entries = 40;
    std::string synth_rich_w1;
    bool synth_implicates = false;
    synth->add_option("--out", synth_out, "Survey CSV to write")->required();
    synth->add_option("--rows", synth_config.rows, "Household rows")
        ->capture_default_str();
    synth->add_option("--alpha", synth_config.alpha, "Pareto exponent")
        ->capture_default_str();
    synth->add_option("--tail-start", synth_tail_start,
                      "Wealth where the Pareto tail begins");
    synth->add_option("--tail-frac", synth_config.tail_fraction,
                      "Fraction of households in the tail")
        ->capture_default_str();
    synth->add_option("--body-median", synth_body_median, "Body median wealth");
    synth->add_option("--body-log-sd", synth_config.body_log_sd,
                      "Body lognormal sigma")
        ->capture_default_str();
    synth->add_option("--weight-low", synth_config.weight_low,
                      "Lower bound of household weights")
        ->capture_default_str();
    synth->add_option("--weight-high", synth_config.weight_high,
                      "Upper bound of household weights")
        ->capture_default_str();
    synth->add_flag("--implicates", synth_implicates,
                    "Emit five imputation implicates");
    synth->add_option("--imputed-frac", synth_config.imputed_fraction,
                      "Fraction of rows with imputation noise")
        ->capture_default_str();
    synth->add_option("--top-code", synth_top_code,
                      "Redraw tail values above this bound");
    synth->add_option("--seed", synth_config.seed, "RNG seed")
        ->capture_default_str();
    synth->add_option("--richlist-out", synth_rich_out,
                      "Also write a consistent rich list here");
    synth->add_option("--richlist-entries", synth_rich_entries,
                      "Entries in the generated rich list")
        ->capture_default_str();
    synth->add_option("--richlist-w1", synth_rich_w1,
                      "Rich-list threshold (default: 100 x tail start)");

    // ---- fit -------------------------------------------------------------
    auto* fit = app.add_subcommand("fit", "Fit the tail exponent");
    std::string fit_survey;
    RichFlags fit_rich;
    CommonIo fit_io;
    std::string fit_estimator = "ml", fit_criterion = "ks";
    std::string fit_wmin, fit_lo, fit_hi;
    unsigned fit_threads = 1;
    fit->add_option("--survey", fit_survey, "Survey CSV")->required();
    add_rich_flags(fit, fit_rich);
    fit->add_option("--estimator", fit_estimator, "Estimator")
        ->check(CLI::IsMember({"ml", "reg", "reg-intercept", "wijk"}))
        ->capture_default_str();
    fit->add_option("--criterion", fit_criterion, "Goodness-of-fit criterion")
        ->check(CLI::IsMember({"ks", "cm"}))
        ->capture_default_str();
    fit->add_option("--wmin", fit_wmin, "Fix w_min instead of selecting it");
    fit->add_option("--range-lo", fit_lo, "Lower bound of the w_min search");
    fit->add_option("--range-hi", fit_hi, "Upper bound of the w_min search");
    fit->add_option("--threads", fit_threads, "Worker threads")
        ->capture_default_str();
    add_io_flags(fit, fit_io);

    // ---- share -----------------------------------------------------------
    auto* share = app.add_subcommand("share", "Top-p wealth shares");
    std::string share_survey;
    RichFlags share_rich;
    CommonIo share_io;
    std::string share_estimator = "ml", share_criterion = "ks",
                share_normalization = "bach";
    std::vector<double> share_p;
    std::string share_wmin, share_w0, share_wmax, share_bandwidth, share_lo,
        share_hi;
    unsigned share_threads = 1;
    share->add_option("--survey", share_survey, "Survey CSV")->required();
    add_rich_flags(share, share_rich);
    share->add_option("--estimator", share_estimator, "Estimator")
        ->check(CLI::IsMember({"ml", "reg", "reg-intercept", "wijk"}))
        ->capture_default_str();
    share->add_option("--criterion", share_criterion, "Goodness-of-fit criterion")
        ->check(CLI::IsMember({"ks", "cm"}))
        ->capture_default_str();
    share->add_option("--normalization", share_normalization,
                      "Tail normalization")
        ->check(CLI::IsMember({"bach", "eckerstorfer", "richlist"}))
        ->capture_default_str();
    share->add_option("--p", share_p, "Share fractions (default 0.01 0.05 0.10)");
    share->add_option("--wmin", share_wmin, "Fix w_min instead of selecting it");
    share->add_option("--range-lo", share_lo, "Lower bound of the w_min search");
    share->add_option("--range-hi", share_hi, "Upper bound of the w_min search");
    share->add_option("--w0", share_w0,
                      "Fix the transition threshold instead of solving for it");
    share->add_option("--wmax", share_wmax,
                      "Tail truncation: a currency amount or 'auto' (rich list)");
    share->add_option("--bandwidth", share_bandwidth,
                      "Kernel bandwidth override");
    share->add_option("--threads", share_threads, "Worker threads")
        ->capture_default_str();
    add_io_flags(share, share_io);

    // ---- wijk ------------------------------------------------------------
    auto* wijk = app.add_subcommand("wijk", "Mean/threshold ratio curve");
    std::string wijk_survey;
    CommonIo wijk_io;
    std::size_t wijk_max = 400;
    wijk->add_option("--survey", wijk_survey, "Survey CSV")->required();
    wijk->add_option("--thresholds", wijk_max, "Maximum number of thresholds")
        ->capture_default_str();
    add_io_flags(wijk, wijk_io);

    // ---- density ---------------------------------------------------------
    auto* density = app.add_subcommand("density", "Histogram and kernel density");
    std::string density_survey;
    CommonIo density_io;
    wt::DensityOptions density_options;
    std::string density_from, density_to, density_bandwidth, density_floor;
    density->add_option("--survey", density_survey, "Survey CSV")->required();
    density->add_option("--grid-n", density_options.grid_points, "Grid points")
        ->capture_default_str();
    density->add_option("--from", density_from, "Grid start");
    density->add_option("--to", density_to, "Grid end");
    density->add_option("--bandwidth", density_bandwidth, "Kernel bandwidth");
    density->add_option("--bandwidth-floor", density_floor,
                        "Select the bandwidth from values above this floor");
    add_io_flags(density, density_io);

    // ---- w0 --------------------------------------------------------------
    auto* w0 = app.add_subcommand("w0", "Continuity transition threshold");
    std::string w0_survey;
    RichFlags w0_rich;
    CommonIo w0_io;
    std::string w0_estimator = "ml", w0_criterion = "ks",
                w0_normalization = "bach";
    std::string w0_wmin, w0_alpha, w0_bandwidth, w0_lo, w0_hi;
    unsigned w0_threads = 1;
    w0->add_option("--survey", w0_survey, "Survey CSV")->required();
    add_rich_flags(w0, w0_rich);
    w0->add_option("--estimator", w0_estimator, "Estimator")
        ->check(CLI::IsMember({"ml", "reg", "reg-intercept", "wijk"}))
        ->capture_default_str();
    w0->add_option("--criterion", w0_criterion, "Goodness-of-fit criterion")
        ->check(CLI::IsMember({"ks", "cm"}))
        ->capture_default_str();
    w0->add_option("--normalization", w0_normalization, "Tail normalization")
        ->check(CLI::IsMember({"bach", "eckerstorfer", "richlist"}))
        ->capture_default_str();
    w0->add_option("--wmin", w0_wmin, "Fix w_min");
    w0->add_option("--alpha", w0_alpha, "Fix alpha");
    w0->add_option("--bandwidth", w0_bandwidth, "Kernel bandwidth override");
    w0->add_option("--range-lo", w0_lo, "Lower bound of the w_min search");
    w0->add_option("--range-hi", w0_hi, "Upper bound of the w_min search");
    w0->add_option("--threads", w0_threads, "Worker threads")
        ->capture_default_str();
    add_io_flags(w0, w0_io);

    // ---- simulate ----------------------------------------------------------
    auto* simulate =
        app.add_subcommand("simulate", "Monte Carlo estimator benchmark");
    CommonIo simulate_io;
    wt::SimulateOptions sim_options;
    std::string sim_wmin_gen = "0.5M", sim_cutoff = "75M";
    std::string sim_variants = "all";
    bool sim_weighted = false, sim_no_renormalize = false, sim_reselect = false;
    simulate->add_option("--alpha", sim_options.base.alpha_true, "True exponent")
        ->capture_default_str();
    simulate->add_option("--wmin-gen", sim_wmin_gen, "Generator threshold");
    simulate->add_option("--n", sim_options.base.n_samples, "Draws per replication")
        ->capture_default_str();
    simulate->add_option("--reps", sim_options.base.n_reps, "Replications")
        ->capture_default_str();
    simulate->add_option("--seed", sim_options.base.seed, "RNG seed")
        ->capture_default_str();
    simulate->add_option("--threads", sim_options.base.threads, "Worker threads")
        ->capture_default_str();
    simulate
        ->add_option("--variants", sim_variants,
                     "'all' for the 2x2 cutoff/weighted grid, 'single' for one")
        ->check(CLI::IsMember({"all", "single"}))
        ->capture_default_str();
    simulate->add_option("--cutoff", sim_cutoff, "Cutoff value");
    simulate->add_flag("--weighted", sim_weighted,
                       "Cell weighting (single-variant mode)");
    simulate->add_flag("--no-renormalize-cells", sim_no_renormalize,
                       "Keep raw cell masses under a cutoff");
    simulate->add_flag("--reselect-wmin", sim_reselect,
                       "Re-select w_min per replication by goodness of fit");
    add_io_flags(simulate, simulate_io);

    app.parse(argc, argv);

    // ---- dispatch ---------------------------------------------------------
    if (*synth) {
      synth_config.tail_start = wt::parse_currency(synth_tail_start);
      synth_config.body_median = wt::parse_currency(synth_body_median);
      synth_config.top_code = parse_currency_opt(synth_top_code);
      synth_config.n_implicates = synth_implicates ? 5 : 0;
      if (synth_implicates && synth_config.imputed_fraction == 0.0)
        synth_config.imputed_fraction = 0.3;
      const auto tables = wt::synth_survey(synth_config);
      wt::write_survey_csv(synth_out, tables);
      wt::json summary;
      summary["survey"] = synth_out;
      summary["rows"] = synth_config.rows;
      summary["implicates"] = synth_config.n_implicates;
      if (!synth_rich_out.empty()) {
        const double w1 = synth_rich_w1.empty()
                              ? 100.0 * synth_config.tail_start
                              : wt::parse_currency(synth_rich_w1);
        const auto rich = wt::synth_richlist(synth_config.alpha, w1,
                                             synth_rich_entries,
                                             synth_config.seed);
        wt::write_richlist_csv(synth_rich_out, rich);
        summary["richlist"] = synth_rich_out;
      }
      wt::RunManifest manifest;
      manifest.subcommand = "synth";
      manifest.seed = synth_config.seed;
      manifest.config = wt::json{
          {"rows", synth_config.rows},
          {"alpha", synth_config.alpha},
          {"tail_start", synth_config.tail_start},
          {"tail_fraction", synth_config.tail_fraction},
          {"body_median", synth_config.body_median},
          {"body_log_sd", synth_config.body_log_sd},
          {"weight_low", synth_config.weight_low},
          {"weight_high", synth_config.weight_high},
          {"implicates", synth_config.n_implicates},
          {"imputed_fraction", synth_config.imputed_fraction},
      };
      if (synth_config.top_code) manifest.config["top_code"] = *synth_config.top_code;
      summary["manifest"] = manifest.to_json();
      std::cout << summary.dump(2) << "\n";
      return 0;
    }

    if (*fit) {
      wt::FitOptions options;
      options.method = wt::alpha_method_from_string(fit_estimator);
      options.criterion = wt::gof_criterion_from_string(fit_criterion);
      options.fixed_wmin = parse_currency_opt(fit_wmin);
      options.range_lo = parse_currency_opt(fit_lo);
      options.range_hi = parse_currency_opt(fit_hi);
      options.threads = fit_threads;

      const auto survey = wt::load_survey_csv(fit_survey);
      const auto rich = load_rich(fit_rich);

      wt::RunManifest manifest;
      manifest.subcommand = "fit";
      manifest.add_input(fit_survey);
      if (rich) manifest.add_input(fit_rich.path);
      manifest.conventions = wt::base_conventions();
      manifest.config = wt::json{
          {"estimator", fit_estimator},
          {"criterion", fit_criterion},
          {"w_min", options.fixed_wmin ? wt::json(*options.fixed_wmin)
                                       : wt::json("selected")},
      };
      if (rich) {
        manifest.config["w1_count"] = rich->w1_count();
        manifest.config["w1_scale"] = rich->w1_scale();
      }

      const auto report = wt::run_fit(survey, rich ? &*rich : nullptr, options,
                                      std::move(manifest));
      emit(fit_io, wt::to_json(report), wt::to_csv(report));
      return payload_exit(report.complete());
    }

    if (*share) {
      wt::ShareOptions options;
      options.method = wt::alpha_method_from_string(share_estimator);
      options.criterion = wt::gof_criterion_from_string(share_criterion);
      options.normalization = wt::normalization_from_string(share_normalization);
      if (!share_p.empty()) options.p_values = share_p;
      options.fixed_wmin = parse_currency_opt(share_wmin);
      options.range_lo = parse_currency_opt(share_lo);
      options.range_hi = parse_currency_opt(share_hi);
      options.fixed_w0 = parse_currency_opt(share_w0);
      if (share_wmax == "auto") {
        options.w_max_from_richlist = true;
      } else {
        options.w_max = parse_currency_opt(share_wmax);
      }
      options.bandwidth = parse_currency_opt(share_bandwidth);
      options.threads = share_threads;

      const auto survey = wt::load_survey_csv(share_survey);
      const auto rich = load_rich(share_rich);

      wt::RunManifest manifest;
      manifest.subcommand = "share";
      manifest.add_input(share_survey);
      if (rich) manifest.add_input(share_rich.path);
      manifest.conventions = wt::base_conventions();
      manifest.config = wt::json{
          {"estimator", share_estimator},
          {"criterion", share_criterion},
          {"normalization", share_normalization},
          {"p", options.p_values},
          {"w_min", options.fixed_wmin ? wt::json(*options.fixed_wmin)
                                       : wt::json("selected")},
          {"w0", options.fixed_w0 ? wt::json(*options.fixed_w0)
                                  : wt::json("continuity")},
          {"w_max", options.w_max ? wt::json(*options.w_max)
                                  : (options.w_max_from_richlist
                                         ? wt::json("auto")
                                         : wt::json("none"))},
          {"bandwidth", options.bandwidth ? wt::json(*options.bandwidth)
                                          : wt::json("sheather-jones")},
      };
      if (rich) {
        manifest.config["w1_count"] = rich->w1_count();
        manifest.config["w1_scale"] = rich->w1_scale();
      }

      const auto report = wt::run_share(survey, rich ? &*rich : nullptr,
                                        options, std::move(manifest));
      emit(share_io, wt::to_json(report), wt::to_csv(report));
      return payload_exit(report.complete());
    }

    if (*wijk) {
      const auto survey = wt::load_survey_csv(wijk_survey);
      wt::WijkOptions options;
      options.max_thresholds = wijk_max;
      wt::RunManifest manifest;
      manifest.subcommand = "wijk";
      manifest.add_input(wijk_survey);
      manifest.conventions = wt::base_conventions();
      manifest.config = wt::json{{"max_thresholds", wijk_max}};
      const auto report = wt::run_wijk(survey.sample, options, std::move(manifest));
      emit(wijk_io, wt::to_json(report), wt::to_csv(report));
      return 0;
    }

    if (*density) {
      const auto survey = wt::load_survey_csv(density_survey);
      density_options.from = parse_currency_opt(density_from);
      density_options.to = parse_currency_opt(density_to);
      density_options.bandwidth = parse_currency_opt(density_bandwidth);
      if (!density_floor.empty())
        density_options.bandwidth_floor = wt::parse_currency(density_floor);
      wt::RunManifest manifest;
      manifest.subcommand = "density";
      manifest.add_input(density_survey);
      manifest.conventions = wt::base_conventions();
      manifest.config = wt::json{{"grid_points", density_options.grid_points}};
      const auto report =
          wt::run_density(survey.sample, density_options, std::move(manifest));
      emit(density_io, wt::to_json(report), wt::to_csv(report));
      return 0;
    }

    if (*w0) {
      wt::W0ReportOptions options;
      options.method = wt::alpha_method_from_string(w0_estimator);
      options.criterion = wt::gof_criterion_from_string(w0_criterion);
      options.normalization = wt::normalization_from_string(w0_normalization);
      options.fixed_wmin = parse_currency_opt(w0_wmin);
      if (!w0_alpha.empty()) options.fixed_alpha = std::stod(w0_alpha);
      options.bandwidth = parse_currency_opt(w0_bandwidth);
      options.range_lo = parse_currency_opt(w0_lo);
      options.range_hi = parse_currency_opt(w0_hi);
      options.threads = w0_threads;

      const auto survey = wt::load_survey_csv(w0_survey);
      const auto rich = load_rich(w0_rich);

      wt::RunManifest manifest;
      manifest.subcommand = "w0";
      manifest.add_input(w0_survey);
      if (rich) manifest.add_input(w0_rich.path);
      manifest.conventions = wt::base_conventions();
      manifest.config = wt::json{{"estimator", w0_estimator},
                                 {"criterion", w0_criterion},
                                 {"normalization", w0_normalization}};

      const auto report = wt::run_w0(survey, rich ? &*rich : nullptr, options,
                                     std::move(manifest));
      emit(w0_io, wt::to_json(report), wt::to_csv(report));
      return 0;
    }

    if (*simulate) {
      sim_options.base.w_min_gen = wt::parse_currency(sim_wmin_gen);
      sim_options.cutoff_value = wt::parse_currency(sim_cutoff);
      sim_options.base.renormalize_cell_mass = !sim_no_renormalize;
      sim_options.base.reselect_wmin = sim_reselect;
      sim_options.all_variants = sim_variants == "all";
      if (!sim_options.all_variants) {
        sim_options.base.weighted = sim_weighted;
        if (simulate->count("--cutoff") > 0)
          sim_options.base.cutoff = sim_options.cutoff_value;
      }

      wt::RunManifest manifest;
      manifest.subcommand = "simulate";
      manifest.seed = sim_options.base.seed;
      manifest.conventions = wt::base_conventions();
      manifest.conventions["cutoff_handling"] = "redraw until accepted";
      manifest.conventions["cells"] = "midpoints of consecutive order statistics";
      manifest.conventions["cell_mass"] = sim_options.base.renormalize_cell_mass
                                              ? "renormalized to accepted region"
                                              : "raw";
      manifest.config = wt::json{
          {"alpha_true", sim_options.base.alpha_true},
          {"w_min_gen", sim_options.base.w_min_gen},
          {"n_samples", sim_options.base.n_samples},
          {"n_reps", sim_options.base.n_reps},
          {"variants", sim_variants},
          {"cutoff_value", sim_options.cutoff_value},
          {"reselect_wmin", sim_options.base.reselect_wmin},
      };

      const auto report = wt::run_simulate(sim_options, std::move(manifest));
      emit(simulate_io, wt::to_json(report), wt::to_csv(report));
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
