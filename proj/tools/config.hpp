#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fyflow::cli {

/// Configuration problem: bad value, unknown key, malformed file. Carries the
/// offending key when one exists.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg, std::string key = {})
        : std::runtime_error(msg), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class KeyType { Double, Int, Bool, String, DoubleList, IntList };

struct KeyDef {
    std::string name; // "section.key"
    KeyType type;
    std::string default_value;
    std::string help;
};

/// Fully resolved run configuration: flat section.key -> value map built from
/// defaults, then the config file, then flag overrides (flags win). Every key
/// is checked against the command's schema; unknown keys are rejected by
/// name, and all range validation runs before any computation starts.
class RunConfig {
public:
    static const std::vector<std::string>& commands();
    static const std::vector<KeyDef>& schema(const std::string& command);

    static RunConfig load(const std::string& command, const std::string& config_path,
                          const std::vector<std::pair<std::string, std::string>>& overrides);

    const std::string& command() const { return command_; }

    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    const std::string& get_string(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
    /// Integer lists accept both comma items and a:b ranges ("1:4,8").
    std::vector<int> get_int_list(const std::string& key) const;

    /// Canonical "key = value" listing of the resolved configuration.
    std::string echo() const;

private:
    RunConfig(std::string command, std::map<std::string, std::string> values);
    const std::string& raw(const std::string& key) const;
    void validate() const;

    std::string command_;
    std::map<std::string, std::string> values_; // key -> raw string
};

/// Parse "[section]\nkey = value" text into section.key pairs; '#' comments.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

} // namespace fyflow::cli
