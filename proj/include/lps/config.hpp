#pragma once
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lps/errors.hpp"
#include "lps/rational.hpp"

namespace lps {

// Flat key = value job description; '#' starts a comment.
//
//   f               = x*y
//   r_squared       = 1
//   variant         = full            (full | star)
//   alpha           = 0               (rational, or "auto")
//   lambda_schedule = 1e-1, 1e-2, 1e-3, 1e-4
//   resolution      = 1024
//   seed            = 1
//   output_dir      = out
struct JobConfig {
    std::string f_expr;
    Rational r_squared = 1;
    std::string variant = "full";
    std::string alpha = "0";  // rational text or "auto"
    std::vector<double> lambda_schedule{1e-1, 1e-2, 1e-3, 1e-4};
    int resolution = 1024;
    std::uint64_t seed = 1;
    std::string output_dir = "out";

    Rational alpha_start() const { return alpha == "auto" ? Rational(0) : parse_rational(alpha); }

    // Canonical serialization; doubles keep their input spelling via %.17g.
    std::string canonical_text() const {
        std::ostringstream os;
        os << "f = " << f_expr << "\n";
        os << "r_squared = " << to_string(r_squared) << "\n";
        os << "variant = " << variant << "\n";
        os << "alpha = " << alpha << "\n";
        os << "lambda_schedule = ";
        for (std::size_t i = 0; i < lambda_schedule.size(); ++i) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", lambda_schedule[i]);
            os << (i ? ", " : "") << buf;
        }
        os << "\n";
        os << "resolution = " << resolution << "\n";
        os << "seed = " << seed << "\n";
        return os.str();
    }

    // FNV-1a of the canonical text; tags output files for reuse.
    std::string content_hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : canonical_text()) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }
};

inline void validate(const JobConfig& cfg) {
    if (cfg.f_expr.empty()) throw ConfigError("config: 'f' is required");
    if (cfg.r_squared <= 0) throw ConfigError("config: r_squared must be positive");
    if (cfg.variant != "full" && cfg.variant != "star")
        throw ConfigError("config: variant must be 'full' or 'star'");
    if (cfg.alpha != "auto") {
        Rational a = parse_rational(cfg.alpha);
        if (a < 0 || a > 1) throw ConfigError("config: alpha must lie in [0, 1]");
    }
    if (cfg.lambda_schedule.empty()) throw ConfigError("config: lambda_schedule is empty");
    for (std::size_t i = 0; i < cfg.lambda_schedule.size(); ++i) {
        if (!(cfg.lambda_schedule[i] > 0.0))
            throw ConfigError("config: lambda values must be positive");
        if (i > 0 && !(cfg.lambda_schedule[i] < cfg.lambda_schedule[i - 1]))
            throw ConfigError("config: lambda_schedule must be strictly decreasing");
    }
    if (cfg.resolution < 64 || cfg.resolution > 8192)
        throw ConfigError("config: resolution must be in [64, 8192]");
}

inline JobConfig parse_config_text(const std::string& text) {
    JobConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        std::size_t a = s.find_first_not_of(" \t\r");
        std::size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "f") {
            cfg.f_expr = value;
        } else if (key == "r_squared") {
            cfg.r_squared = parse_rational(value);
        } else if (key == "variant") {
            cfg.variant = value;
        } else if (key == "alpha") {
            cfg.alpha = value;
        } else if (key == "lambda_schedule") {
            cfg.lambda_schedule.clear();
            std::istringstream vs(value);
            std::string item;
            while (std::getline(vs, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                try {
                    cfg.lambda_schedule.push_back(std::stod(item));
                } catch (const std::exception&) {
                    throw ConfigError("config line " + std::to_string(lineno) +
                                      ": bad lambda value '" + item + "'");
                }
            }
        } else if (key == "resolution") {
            cfg.resolution = std::stoi(value);
        } else if (key == "seed") {
            cfg.seed = std::stoull(value);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else {
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        }
    }
    validate(cfg);
    return cfg;
}

inline JobConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace lps
