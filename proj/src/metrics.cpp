#include "drlnav/metrics.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drlnav/errors.hpp"

namespace drlnav {

std::vector<double> trailing_mean(std::span<const double> series, size_t window) {
    if (window < 1) throw std::invalid_argument("trailing_mean: window must be >= 1");
    std::vector<double> out(series.size());
    double sum = 0;
    for (size_t i = 0; i < series.size(); ++i) {
        sum += series[i];
        if (i >= window) sum -= series[i - window];
        const size_t n = std::min(i + 1, window);
        out[i] = sum / static_cast<double>(n);
    }
    return out;
}

std::vector<double> ema_smooth(std::span<const double> series, double factor) {
    if (!(factor >= 0.0 && factor < 1.0))
        throw std::invalid_argument("ema_smooth: factor must lie in [0,1)");
    std::vector<double> out(series.size());
    for (size_t i = 0; i < series.size(); ++i)
        out[i] = i == 0 ? series[0] : factor * out[i - 1] + (1.0 - factor) * series[i];
    return out;
}

double stability_measure(std::span<const long> steps, long threshold, size_t convergence_start) {
    if (convergence_start >= steps.size())
        throw std::invalid_argument("stability_measure: convergence_start beyond series");
    size_t below = 0, total = 0;
    for (size_t i = convergence_start; i < steps.size(); ++i) {
        ++total;
        if (steps[i] < threshold) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(total);
}

std::optional<long> detect_convergence(const RunLog& log, RunKind kind) {
    const size_t n = log.rows.size();
    if (n < kTrailingWindow) return std::nullopt;
    if (kind == RunKind::Discrete) {
        size_t successes = 0;  // successes within the sliding window
        for (size_t i = 0; i < n; ++i) {
            if (log.rows[i].reward == 1.0) ++successes;
            if (i >= kTrailingWindow && log.rows[i - kTrailingWindow].reward == 1.0) --successes;
            if (i + 1 >= kTrailingWindow && successes == kTrailingWindow)
                return log.rows[i].episode;
        }
        return std::nullopt;
    }
    double reward_sum = 0, step_sum = 0;
    for (size_t i = 0; i < n; ++i) {
        reward_sum += log.rows[i].reward;
        step_sum += static_cast<double>(log.rows[i].steps);
        if (i >= kTrailingWindow) {
            reward_sum -= log.rows[i - kTrailingWindow].reward;
            step_sum -= static_cast<double>(log.rows[i - kTrailingWindow].steps);
        }
        if (i + 1 >= kTrailingWindow) {
            const double w = static_cast<double>(kTrailingWindow);
            if (reward_sum / w > kContinuousRewardThreshold &&
                step_sum / w < kContinuousStepThreshold)
                return log.rows[i].episode;
        }
    }
    return std::nullopt;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw ParseError("csv: bad number '" + s + "'");
    return v;
}

long parse_long(const std::string& s) {
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') throw ParseError("csv: bad integer '" + s + "'");
    return v;
}

constexpr const char* kHeader = "episode,reward,steps,outcome,epsilon_or_noise,mean_loss";

}  // namespace

std::string run_log_to_csv(const RunLog& log) {
    std::ostringstream os;
    os << "# drlnav-run v1\n";
    os << "# algo: " << log.algo << "\n";
    os << "# env: " << log.env << "\n";
    os << "# seed: " << log.seed << "\n";
    for (const auto& [k, v] : log.config) os << "# config." << k << ": " << v << "\n";
    os << kHeader << "\n";
    for (const auto& r : log.rows) {
        os << r.episode << "," << fmt_double(r.reward) << "," << r.steps << "," << r.outcome
           << "," << fmt_double(r.epsilon_or_noise) << "," << fmt_double(r.mean_loss) << "\n";
    }
    return os.str();
}

RunLog run_log_from_csv(const std::string& text) {
    RunLog log;
    std::istringstream is(text);
    std::string line;
    bool header_seen = false;
    bool magic_seen = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string body = line.substr(1);
            if (!body.empty() && body[0] == ' ') body.erase(0, 1);
            if (body == "drlnav-run v1") {
                magic_seen = true;
                continue;
            }
            const auto colon = body.find(": ");
            if (colon == std::string::npos) throw ParseError("csv: malformed metadata line");
            const std::string key = body.substr(0, colon);
            const std::string value = body.substr(colon + 2);
            if (key == "algo")
                log.algo = value;
            else if (key == "env")
                log.env = value;
            else if (key == "seed")
                log.seed = std::strtoull(value.c_str(), nullptr, 10);
            else if (key.rfind("config.", 0) == 0)
                log.config.emplace_back(key.substr(7), value);
            else
                throw ParseError("csv: unknown metadata key '" + key + "'");
            continue;
        }
        if (!header_seen) {
            if (line != kHeader) throw ParseError("csv: unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string f[6];
        for (int i = 0; i < 6; ++i)
            if (!std::getline(ls, f[i], i == 5 ? '\n' : ','))
                throw ParseError("csv: short row '" + line + "'");
        EpisodeRow r;
        r.episode = parse_long(f[0]);
        r.reward = parse_double(f[1]);
        r.steps = parse_long(f[2]);
        r.outcome = f[3];
        r.epsilon_or_noise = parse_double(f[4]);
        r.mean_loss = parse_double(f[5]);
        log.rows.push_back(std::move(r));
    }
    if (!magic_seen || !header_seen) throw ParseError("csv: not a drlnav-run file");
    return log;
}

void save_run_log(const RunLog& log, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << run_log_to_csv(log);
    if (!os.good()) throw std::runtime_error("write failed for " + path);
}

RunLog load_run_log(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return run_log_from_csv(ss.str());
}

}  // namespace drlnav
