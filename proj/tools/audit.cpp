// audit: persona-conditioned LLM classification and rationale auditing.
//
// Subcommands:
//   audit run --config cfg.json --out dir [--provider simulated|http]
//             [--variant cot|no-cot] [--runs N] [--seed S]
//   audit report --from <previous run dir> --out dir
//   audit personas list

#include <CLI11.hpp>

#include "ppaudit/report.hpp"
#include "ppaudit/util.hpp"

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace ppaudit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitTransport = 3;

void apply_overrides(AuditConfig & config, const std::string & provider,
                     const std::string & variant, int runs, long long seed) {
    if (!provider.empty()) {
        auto kind = provider_kind_from_name(provider);
        if (!kind) throw ConfigError("--provider must be 'simulated' or 'http'");
        config.provider.kind = *kind;
    }
    if (!variant.empty()) {
        auto v = prompt_variant_from_name(variant);
        if (!v) throw ConfigError("--variant must be 'cot' or 'no-cot'");
        config.variant = *v;
    }
    if (runs > 0) config.runs = runs;
    if (seed >= 0) {
        config.seed = static_cast<uint64_t>(seed);
        config.simulated.seed = config.seed;
        config.metrics.bootstrap.seed = config.seed;
    }
}

int run_command(const std::string & config_path, const std::string & out_dir,
                const std::string & provider, const std::string & variant, int runs,
                long long seed) {
    AuditConfig config = load_config(config_path);
    apply_overrides(config, provider, variant, runs, seed);
    if (config.cache_path.empty()) config.cache_path = (fs::path(out_dir) / "responses.jsonl").string();
    if (config.records_path.empty()) config.records_path = (fs::path(out_dir) / "records.jsonl").string();

    ReportBundle bundle = run_audit(config);
    auto files = emit(bundle, out_dir);
    std::cout << "audit complete: " << bundle.manifest.work_item_count << " work items, "
              << bundle.manifest.cache_hit_count << " cache hits\n";
    for (const auto & f : files) std::cout << "  wrote " << f << "\n";
    return kExitOk;
}

int report_command(const std::string & from_dir, const std::string & out_dir,
                   const std::string & config_override) {
    fs::path from(from_dir);
    std::string config_path = config_override.empty() ? (from / "config.json").string()
                                                      : config_override;
    if (!fs::exists(config_path)) {
        throw ConfigError("no config found at " + config_path +
                          " (expected a previous `audit run` output directory)");
    }
    AuditConfig config = load_config(config_path);
    config.cache_path = (from / "responses.jsonl").string();
    if (!fs::exists(config.cache_path)) {
        throw ConfigError("no response cache found at " + config.cache_path);
    }
    config.records_path = (fs::path(out_dir) / "records.jsonl").string();

    ReportBundle bundle = run_audit(config);
    auto files = emit(bundle, out_dir);
    std::cout << "report rebuilt from cache: " << bundle.manifest.cache_hit_count << "/"
              << bundle.manifest.work_item_count << " items served from "
              << config.cache_path << "\n";
    for (const auto & f : files) std::cout << "  wrote " << f << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char ** argv) {
    CLI::App app{"Persona-prompting audit for LLM labels and token rationales"};
    app.require_subcommand(1);

    auto * run = app.add_subcommand("run", "Execute an audit end to end");
    std::string run_config;
    std::string run_out;
    std::string run_provider;
    std::string run_variant;
    int run_runs = 0;
    long long run_seed = -1;
    run->add_option("--config", run_config, "Audit config JSON")->required();
    run->add_option("--out", run_out, "Output directory")->required();
    run->add_option("--provider", run_provider, "Override provider kind: simulated|http");
    run->add_option("--variant", run_variant, "Override prompt variant: cot|no-cot");
    run->add_option("--runs", run_runs, "Override run count");
    run->add_option("--seed", run_seed, "Override master seed");

    auto * report = app.add_subcommand("report", "Recompute analyses from a cached run");
    std::string report_from;
    std::string report_out;
    std::string report_config;
    report->add_option("--from", report_from, "Previous run directory (cache + config)")->required();
    report->add_option("--out", report_out, "Output directory")->required();
    report->add_option("--config", report_config, "Config override (defaults to <from>/config.json)");

    auto * personas_cmd = app.add_subcommand("personas", "Persona registry commands");
    auto * personas_list = personas_cmd->add_subcommand("list", "Print the registry as JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            return run_command(run_config, run_out, run_provider, run_variant, run_runs, run_seed);
        }
        if (*report) {
            return report_command(report_from, report_out, report_config);
        }
        if (*personas_cmd) {
            if (*personas_list || personas_cmd->get_subcommands().empty()) {
                std::cout << registry_json() << "\n";
                return kExitOk;
            }
        }
    } catch (const TransportError & e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const ConfigError & e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError & e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const IoError & e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception & e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
