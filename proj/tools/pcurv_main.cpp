#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pcurv/config.hpp"
#include "pcurv/errors.hpp"

namespace {

void write_payload(const std::string& path, const std::string& payload) {
    if (path.empty() || path == "-") {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw pcurv::Error(pcurv::ErrorCode::ConfigError, "cannot open output file " + path);
    out << payload;
    if (!out) throw pcurv::Error(pcurv::ErrorCode::ConfigError, "failed writing " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bubble, reduced energy and certificate computations"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    const char* names[] = {"constants", "gamma-scan", "expansion-check", "certificate"};
    const char* help[] = {"dump the constants table as JSON", "scan Gamma over a (x0, lambda) grid as CSV",
                          "fit the small-lambda expansion of Gamma - psi", "search critical points and decide existence"};
    for (int i = 0; i < 4; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_path, "output path; '-' or omitted uses the config output or stdout");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        const pcurv::RunConfig cfg = pcurv::load_config(config_path);
        const std::string dest = out_path.empty() ? cfg.output : out_path;
        if (cmd == "constants") {
            write_payload(dest, pcurv::run_constants(cfg).dump(2) + "\n");
        } else if (cmd == "gamma-scan") {
            write_payload(dest, pcurv::run_gamma_scan(cfg));
        } else if (cmd == "expansion-check") {
            write_payload(dest, pcurv::run_expansion_check(cfg).dump(2) + "\n");
        } else {
            pcurv::Certificate cert;
            write_payload(dest, pcurv::run_certificate(cfg, &cert).dump(2) + "\n");
            return cert.verdict == pcurv::Verdict::Exists ? 0 : 3;
        }
    } catch (const pcurv::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pcurv::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    }
    return 0;
}
