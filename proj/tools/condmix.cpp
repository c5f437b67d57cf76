// Command-line front end: one subcommand per experiment, plus a fast selftest.
// Each run writes results.csv and manifest.json into its own directory; output
// bytes depend only on the configuration (including the seed), never on the
// thread count or the wall clock.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "condmix/exp/experiments.hpp"
#include "condmix/geometry/covering.hpp"
#include "condmix/interval/interval.hpp"

namespace fs = std::filesystem;
using namespace condmix;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out = "runs";
    bool overwrite = false;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<unsigned> precision_bits;
};

nlohmann::json load_overlay(const std::string& path) {
    if (path.empty()) return nlohmann::json::object();
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
}

std::string utc_stamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
    return buf;
}

fs::path pick_run_dir(const CommonFlags& c, const std::string& experiment) {
    const fs::path base(c.out);
    if (c.overwrite) return base / experiment;
    fs::path dir = base / (experiment + "-" + utc_stamp());
    for (int k = 2; fs::exists(dir); ++k)
        dir = base / (experiment + "-" + utc_stamp() + "-" + std::to_string(k));
    return dir;
}

int run_one(const std::string& experiment, const CommonFlags& c) {
    nlohmann::json overlay = load_overlay(c.config_path);
    RunConfig cfg = parse_config(experiment, overlay);
    if (c.seed) cfg.seed = *c.seed;
    if (c.threads) cfg.threads = *c.threads;
    if (c.precision_bits) cfg.precision_bits = *c.precision_bits;
    validate_config(cfg);
    set_default_precision(static_cast<mpfr_prec_t>(cfg.precision_bits));

    const fs::path dir = pick_run_dir(c, experiment);
    fs::create_directories(dir);
    const RunOutput out = run_experiment(cfg);
    write_text_file((dir / "results.csv").string(), to_csv(out.table));
    write_text_file((dir / "manifest.json").string(), manifest_json(cfg, out.summary).dump(2) + "\n");
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

// --- selftest: a quick health battery over every module -------------------

int check(bool ok, const char* name, const std::string& detail = "") {
    if (ok)
        std::printf("ok   %s\n", name);
    else
        std::printf("FAIL %s%s%s\n", name, detail.empty() ? "" : ": ", detail.c_str());
    return ok ? 0 : 1;
}

int selftest(std::uint64_t seed) {
    int failures = 0;

    {  // interval arithmetic contains a higher-precision evaluation
        auto g = rng_stream(seed, "selftest-interval", 0);
        bool ok = true;
        for (int i = 0; i < 2000 && ok; ++i) {
            const double a = 4.0 * g.next_unit() - 2.0;
            const double b = 4.0 * g.next_unit() - 2.0;
            const double c = 4.0 * g.next_unit() - 2.0;
            const Interval r = Interval(a) * Interval(b) + Interval(c) / Interval(3.0);
            const mpfr_prec_t hp = 2 * default_precision();
            MpReal ref(a, hp);
            ref = ref * MpReal(b, hp) + MpReal(c, hp) / MpReal(3.0, hp);
            ok = r.contains(ref);
        }
        failures += check(ok, "interval containment");
    }

    {  // segment dynamics stay tight and keep cutting
        const LoziParams params(1.8, 0.35);
        SegmentState st = init_segment(params);
        auto g = rng_stream(seed, "selftest-segment", 0);
        std::uint64_t cuts = 0;
        for (int i = 0; i < 2000; ++i) {
            auto [next, rec] = segment_step(std::move(st), g.next_u64(), StepMode::reweight);
            st = std::move(next);
            if (rec.was_cut) ++cuts;
        }
        const double w = std::max({st.xp.width(), st.xq.width(), st.yshared.width()});
        failures += check(w < 1e-30 && cuts > 200, "segment dynamics",
                          "width " + std::to_string(w) + ", cuts " + std::to_string(cuts));
    }

    {  // leaf-measure sampler matches closed-form first two moments
        const BakerMap map = BakerMap::linear(2, 0.45, {0.0, 0.55});
        auto g = rng_stream(seed, "selftest-baker", 0);
        const int d = nu0_depth(map.mu_bound);
        const std::size_t m = 40000;
        double s1 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double y = nu0_draw(map, g, d);
            s1 += y;
            s2 += y * y;
        }
        s1 /= m;
        s2 /= m;
        // mean = obar/(1-mu), second moment from the fixed-point equation
        const double mean = 0.275 / 0.55;
        const double mom2 = (2 * 0.45 * mean * 0.275 + 0.5 * 0.55 * 0.55) / (1 - 0.45 * 0.45);
        const bool ok = std::fabs(s1 - mean) < 0.01 && std::fabs(s2 - mom2) < 0.01;
        failures += check(ok, "baker leaf measure",
                          "mean " + std::to_string(s1) + " vs " + std::to_string(mean));
    }

    {  // Student-t machinery reproduces the dof-19 99% quantile
        ReplicaEstimate est;
        for (int r = 0; r < 20; ++r) {
            est.means.push_back(r % 2 == 0 ? 1.0 : -1.0);
            est.radii.push_back(0.0);
        }
        const StudentCi ci = student_ci(est, 0.99);
        const bool ok = std::fabs(ci.quantile - 2.860935) < 1e-4 && std::fabs(ci.mean) < 1e-15;
        failures += check(ok, "student quantile", "q " + std::to_string(ci.quantile));
    }

    {  // accumulator ratio is exact for rationals with small denominators
        BirkhoffAccumulator<Interval> acc;
        accumulate(acc, Interval(0.5), Interval(3.0));
        accumulate(acc, Interval(0.25), Interval(-1.0));
        const Interval r = ratio(acc);
        const bool ok = std::fabs(r.mid_double() - (1.5 - 0.25) / 0.75) < 1e-15 &&
                        r.width() < 1e-15;
        failures += check(ok, "weighted accumulator");
    }

    {  // posterior reweighting matches the Gaussian likelihood ratio
        Ensemble e;
        e.x = {0.0, 1.0};
        e.y = {0.0, 0.0};
        e.w = {0.5, 0.5};
        const Ensemble post =
            bayes_update(e, Observation{[](double x, double) { return x; }, 0.0, 1.0, 1e-3});
        const bool ok = std::fabs(post.w[0] / post.w[1] - std::exp(0.5)) < 1e-12;
        failures += check(ok, "bayes update");
    }

    {  // grid distance on a 3-4-5 offset is exact
        const Box box{-1.5, 1.5, -1.5, 1.5};
        GridCover u(box, 0.01), v(box, 0.01);
        u.insert(0.0, 0.0);
        v.insert(0.03, 0.04);
        const bool ok = std::fabs(hausdorff(u, v) - 0.05) < 1e-12;
        failures += check(ok, "grid hausdorff");
    }

    std::printf(failures == 0 ? "selftest passed\n" : "selftest: %d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"condmix: conditional-measure experiments for Lozi and baker's maps"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> experiments{
        {"lozi-cond-mix", "conditional correlation decay on a vertical slice"},
        {"lozi-cond-hist", "conditional measure histogram on a vertical slice"},
        {"lozi-covering", "distance from the pushed slice to the attractor"},
        {"baker-mix", "conditional correlation decay for a baker's map"},
        {"baker-fourier", "Fourier decay of the leaf-parameter pushforward"},
        {"bayes-forecast", "forecast-skill decay toward climatology"},
    };

    std::vector<CommonFlags> flags(experiments.size());
    for (std::size_t i = 0; i < experiments.size(); ++i) {
        CLI::App* sub = app.add_subcommand(experiments[i].first, experiments[i].second);
        CommonFlags& c = flags[i];
        sub->add_option("--config", c.config_path, "JSON config file");
        sub->add_option("--out", c.out, "output root directory")->capture_default_str();
        sub->add_flag("--overwrite", c.overwrite, "fixed run directory <out>/<experiment>");
        sub->add_option("--seed", c.seed, "override the seed");
        sub->add_option("--threads", c.threads, "override the worker count");
        sub->add_option("--precision-bits", c.precision_bits, "override the interval precision");
    }
    std::uint64_t selftest_seed = 1234;
    CLI::App* self = app.add_subcommand("selftest", "run a fast built-in health battery");
    self->add_option("--seed", selftest_seed, "selftest seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(self)) return selftest(selftest_seed);
        for (std::size_t i = 0; i < experiments.size(); ++i)
            if (app.got_subcommand(experiments[i].first))
                return run_one(experiments[i].first, flags[i]);
        std::fprintf(stderr, "no subcommand selected\n");
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
