#include "mcsched/harness.hpp"

#include "mcsched/dualrate.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mcsched {

std::string to_string(Algorithm a) { return a == Algorithm::Soma ? "soma" : "dualrate"; }

Algorithm parse_algorithm(const std::string& s) {
    if (s == "soma") return Algorithm::Soma;
    if (s == "dualrate") return Algorithm::DualRate;
    throw std::invalid_argument("unknown algorithm: " + s);
}

namespace {

constexpr std::pair<SweepParam, const char*> kSweepNames[] = {
    {SweepParam::TargetBound, "U_B"}, {SweepParam::HiFraction, "P_H"}, {SweepParam::HiCount, "n_H"},
    {SweepParam::MaxUtil, "u_max"},   {SweepParam::LoOfLo, "U_LL"},
};

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

}  // namespace

std::string to_string(SweepParam p) {
    for (const auto& [k, name] : kSweepNames)
        if (k == p) return name;
    return "?";
}

SweepParam parse_sweep_param(const std::string& s) {
    for (const auto& [k, name] : kSweepNames)
        if (s == name) return k;
    throw std::invalid_argument("unknown sweep parameter: " + s);
}

std::vector<Rat> default_bound_grid() {
    std::vector<Rat> grid;
    for (int i = 10; i <= 20; ++i) grid.emplace_back(i, 20);
    return grid;
}

void ExperimentConfig::validate() const {
    if (m_values.empty()) throw std::invalid_argument("no processor counts");
    if (values.empty()) throw std::invalid_argument("empty sweep grid");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (algorithms.empty()) throw std::invalid_argument("no algorithms");
    if (threads < 0) throw std::invalid_argument("negative thread count");
    for (int m : m_values)
        for (const auto& v : values) generator(m, v).validate();
}

GeneratorConfig ExperimentConfig::generator(int m, const Rat& value) const {
    GeneratorConfig g;
    g.m = m;
    g.target_bound = target_bound;
    g.hi_fraction = hi_fraction;
    g.n_hi_min = n_hi_min;
    g.n_hi_max = n_hi_max;
    g.u_max = u_max;
    g.lo_of_lo = lo_of_lo;
    switch (sweep) {
        case SweepParam::TargetBound: g.target_bound = value; break;
        case SweepParam::HiFraction: g.hi_fraction = value.to_double(); break;
        case SweepParam::HiCount: {
            if (value.den() != 1) throw std::invalid_argument("n_H sweep values must be integers");
            const int n = static_cast<int>(value.num().get_si());
            g.n_hi_min = g.n_hi_max = n;
            break;
        }
        case SweepParam::MaxUtil: g.u_max = value; break;
        case SweepParam::LoOfLo: g.lo_of_lo = value; break;
    }
    return g;
}

std::optional<double> PointComparison::conditional_ratio() const {
    if (dual_rejected == 0) return std::nullopt;
    return static_cast<double>(rescued) / dual_rejected;
}

uint64_t trial_seed(uint64_t master, int m, size_t point, int trial) {
    return derive_seed(master, {static_cast<uint64_t>(m), point, static_cast<uint64_t>(trial)});
}

namespace {

struct TrialOutcome {
    bool generated = false;
    bool soma = false;
    bool dual = false;
};

TrialOutcome run_trial(const ExperimentConfig& cfg, GeneratorConfig g, uint64_t seed, bool want_soma,
                       bool want_dual) {
    TrialOutcome out;
    g.seed = seed;
    std::optional<TaskSet> ts;
    try {
        ts = generate(g);
    } catch (const GenerationError&) {
        return out;
    }
    out.generated = true;
    if (want_soma) out.soma = soma(*ts, cfg.soma).success;
    if (want_dual) out.dual = dual_rate_assign(*ts).has_value();
    return out;
}

}  // namespace

ExperimentResult run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    const bool want_soma = std::count(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::Soma) > 0;
    const bool want_dual = std::count(cfg.algorithms.begin(), cfg.algorithms.end(), Algorithm::DualRate) > 0;
    int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, cfg.trials);

    ExperimentResult result;
    for (int m : cfg.m_values) {
        for (size_t p = 0; p < cfg.values.size(); ++p) {
            const GeneratorConfig g = cfg.generator(m, cfg.values[p]);
            std::vector<TrialOutcome> outcomes(cfg.trials);
            std::atomic<int> next{0};
            auto worker = [&] {
                for (int t = next++; t < cfg.trials; t = next++)
                    outcomes[t] = run_trial(cfg, g, trial_seed(cfg.seed, m, p, t), want_soma, want_dual);
            };
            if (threads == 1) {
                worker();
            } else {
                std::vector<std::thread> pool;
                for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
                for (auto& th : pool) th.join();
            }

            PointComparison cmp{m, cfg.values[p]};
            int generated = 0, soma_ok = 0, dual_ok = 0;
            for (const auto& o : outcomes) {
                if (!o.generated) continue;
                ++generated;
                soma_ok += o.soma;
                dual_ok += o.dual;
                cmp.dual_rejected += !o.dual;
                cmp.rescued += o.soma && !o.dual;
            }
            cmp.total = generated;
            for (Algorithm a : cfg.algorithms) {
                ResultRow row;
                row.m = m;
                row.param_name = to_string(cfg.sweep);
                row.param_value = cfg.values[p];
                row.algorithm = a;
                row.accepted = a == Algorithm::Soma ? soma_ok : dual_ok;
                row.total = generated;
                row.generation_failures = cfg.trials - generated;
                result.rows.push_back(std::move(row));
            }
            if (want_soma && want_dual) result.comparisons.push_back(cmp);
        }
    }
    return result;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) { return run_sweep(cfg).rows; }

Rat weighted_acceptance_ratio(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("no rows");
    Rat num, den;
    for (const auto& r : rows) {
        if (r.m != rows[0].m || r.algorithm != rows[0].algorithm || r.param_name != rows[0].param_name)
            throw std::invalid_argument("rows mix processor counts, algorithms or sweeps");
        if (r.total == 0) continue;
        num += Rat(r.accepted, r.total) * r.param_value;
        den += r.param_value;
    }
    if (!den.is_positive()) throw std::invalid_argument("zero total weight");
    return num / den;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    os << kCsvHeader << "\n";
    for (const auto& r : rows)
        os << r.m << "," << r.param_name << "," << r.param_value.to_string() << "," << to_string(r.algorithm) << ","
           << r.accepted << "," << r.total << "," << fixed(r.ratio(), 6) << "\n";
}

std::vector<ResultRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kCsvHeader) throw std::invalid_argument("missing CSV header");
    std::vector<ResultRow> rows;
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() != 7) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 7 fields");
        try {
            ResultRow r;
            r.m = std::stoi(f[0]);
            r.param_name = f[1];
            r.param_value = Rat::parse(f[2]);
            r.algorithm = parse_algorithm(f[3]);
            r.accepted = std::stoi(f[4]);
            r.total = std::stoi(f[5]);
            if (r.accepted < 0 || r.accepted > r.total) throw std::invalid_argument("accepted outside [0, total]");
            rows.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return rows;
}

void write_svg(std::ostream& os, const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("no rows to plot");
    constexpr double W = 640, H = 420, left = 70, right = 170, top = 30, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    double xmin = rows[0].param_value.to_double(), xmax = xmin;
    for (const auto& r : rows) {
        xmin = std::min(xmin, r.param_value.to_double());
        xmax = std::max(xmax, r.param_value.to_double());
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.05;
        xmax += 0.05;
    }
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + (1.0 - y) * ph; };

    std::map<std::pair<int, Algorithm>, std::vector<const ResultRow*>> series;
    for (const auto& r : rows) series[{r.m, r.algorithm}].push_back(&r);
    for (auto& [key, pts] : series)
        std::stable_sort(pts.begin(), pts.end(),
                         [](const ResultRow* a, const ResultRow* b) { return a->param_value < b->param_value; });

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << sy(0) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(0)
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << sy(0) << "\" x2=\"" << left << "\" y2=\"" << sy(1)
       << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double y = i / 5.0;
        os << "<line x1=\"" << left - 4 << "\" y1=\"" << fixed(sy(y), 2) << "\" x2=\"" << left << "\" y2=\""
           << fixed(sy(y), 2) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << left - 8 << "\" y=\"" << fixed(sy(y) + 4, 2) << "\" text-anchor=\"end\">"
           << fixed(y, 1) << "</text>\n";
    }
    std::vector<double> xs;
    for (const auto& r : rows) xs.push_back(r.param_value.to_double());
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    const size_t stride = (xs.size() + 10) / 11;
    for (size_t i = 0; i < xs.size(); i += stride) {
        os << "<line x1=\"" << fixed(sx(xs[i]), 2) << "\" y1=\"" << sy(0) << "\" x2=\"" << fixed(sx(xs[i]), 2)
           << "\" y2=\"" << sy(0) + 4 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << fixed(sx(xs[i]), 2) << "\" y=\"" << sy(0) + 18 << "\" text-anchor=\"middle\">"
           << fixed(xs[i], 2) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
       << rows[0].param_name << "</text>\n";
    os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << top + ph / 2 << ")\">acceptance ratio</text>\n";

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    size_t idx = 0;
    for (const auto& [key, pts] : series) {
        const char* color = colors[idx % std::size(colors)];
        const char* dash = key.second == Algorithm::DualRate ? " stroke-dasharray=\"6 3\"" : "";
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << " points=\"";
        for (size_t i = 0; i < pts.size(); ++i)
            os << (i ? " " : "") << fixed(sx(pts[i]->param_value.to_double()), 2) << ","
               << fixed(sy(pts[i]->ratio()), 2);
        os << "\"/>\n";
        for (const auto* r : pts)
            os << "<circle cx=\"" << fixed(sx(r->param_value.to_double()), 2) << "\" cy=\""
               << fixed(sy(r->ratio()), 2) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double ly = top + 10 + 20.0 * static_cast<double>(idx);
        os << "<line x1=\"" << W - right + 15 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 40 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << dash << "/>\n";
        os << "<text x=\"" << W - right + 46 << "\" y=\"" << ly + 4 << "\">" << to_string(key.second)
           << " m=" << key.first << "</text>\n";
        ++idx;
    }
    os << "</svg>\n";
}

}  // namespace mcsched
