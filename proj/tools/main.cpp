#include "commands.hpp"
#include "config.hpp"

#include "fyflow/errors.hpp"

#include <nlohmann/json.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

using fyflow::cli::ConfigError;
using fyflow::cli::RunConfig;

void print_usage() {
    std::cout << "usage: fyflow <command> [--config FILE] [--section.key=value ...]\n\n"
              << "commands:\n";
    for (const auto& c : RunConfig::commands()) std::cout << "  " << c << "\n";
    std::cout << "\nuse `fyflow <command> --help` for the command's keys.\n"
              << "precedence: flags > config file > defaults.\n"
              << "FYFLOW_THREADS sets the worker-pool size for sweeps.\n";
}

void print_command_help(const std::string& command) {
    std::cout << "keys for " << command << " (key = default  # description):\n";
    for (const auto& d : RunConfig::schema(command))
        std::cout << "  " << d.name << " = " << d.default_value << "  # " << d.help << "\n";
}

void emit_failure(const char* kind, const std::string& message) {
    std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args[0] == "--help" || args[0] == "-h") {
        print_usage();
        return args.empty() ? 2 : 0;
    }

    const std::string command = args[0];
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;

    try {
        if (std::find(args.begin() + 1, args.end(), "--help") != args.end()) {
            print_command_help(command);
            return 0;
        }
        for (std::size_t i = 1; i < args.size(); ++i) {
            const std::string& a = args[i];
            if (!a.starts_with("--"))
                throw ConfigError("unexpected argument \"" + a + "\"");
            std::string body = a.substr(2);
            std::string value;
            const auto eq = body.find('=');
            if (eq != std::string::npos) {
                value = body.substr(eq + 1);
                body = body.substr(0, eq);
            } else {
                if (i + 1 >= args.size())
                    throw ConfigError("flag \"--" + body + "\" is missing a value");
                value = args[++i];
            }
            if (body == "config")
                config_path = value;
            else
                overrides.emplace_back(body, value);
        }

        const RunConfig cfg = RunConfig::load(command, config_path, overrides);
        std::cout << cfg.echo();
        const int code = fyflow::cli::run_command(cfg);
        if (code != 0)
            emit_failure("assertion",
                         "embedded checks failed; see the run's report files");
        return code;
    } catch (const ConfigError& e) {
        emit_failure("config", e.what());
        return 2;
    } catch (const fyflow::SolverError& e) {
        emit_failure("solver", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_failure("internal", e.what());
        return 1;
    }
}
