#ifndef HELMTG_CLI_HPP
#define HELMTG_CLI_HPP

#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace helmtg {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One run = one human-readable key-value document ("key = value" lines,
/// '#' comments, comma-separated lists). Unknown keys are rejected after a
/// command has consumed what it understands; parse -> serialize -> parse is
/// the identity.
class RunConfig {
  public:
    static RunConfig parse(const std::string& text);
    static RunConfig load(const std::string& path);
    std::string serialize() const;

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const;
    std::string str_required(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    double number_required(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    bool flag(const std::string& key, bool fallback) const;
    std::vector<double> number_list(const std::string& key) const; // empty if absent
    std::vector<std::string> str_list(const std::string& key) const;

    /// throw ConfigError if any key was never consumed by a getter
    void reject_unknown() const;

    friend bool operator==(const RunConfig& a, const RunConfig& b) { return a.kv_ == b.kv_; }

  private:
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> consumed_;
};

/// Exit codes: 0 success, 2 config error, 3 non-convergence.
int cmd_solve(const RunConfig& cfg, const std::string& out_path, std::ostream& log);
int cmd_lfa1d(const RunConfig& cfg, const std::string& out_path, std::ostream& log);
int cmd_lfa2d(const RunConfig& cfg, const std::string& out_path, std::ostream& log);
int cmd_dispersion(const RunConfig& cfg, const std::string& out_path, std::ostream& log);
int cmd_bench(const RunConfig& cfg, const std::string& out_path, std::ostream& log);

/// Locale-independent numeric formatting used for all CSV output.
std::string format_number(double v);

} // namespace helmtg

#endif
