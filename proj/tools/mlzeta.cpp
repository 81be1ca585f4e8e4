// Command-line front end for the multiple Lerch/Hurwitz zeta toolkit:
// evaluation, residues, singularity reports, verification and benchmarks.

#include "mlz/bernoulli.hpp"
#include "mlz/classifier.hpp"
#include "mlz/core.hpp"
#include "mlz/evaluator.hpp"
#include "mlz/matrices.hpp"
#include "mlz/residues.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using json = nlohmann::ordered_json;
using namespace mlz;

namespace {

int exit_code_for(ErrorClass cls) {
    switch (cls) {
        case ErrorClass::usage: return 1;
        case ErrorClass::pole_proximity: return 2;
        case ErrorClass::conditioning: return 2;
        case ErrorClass::accuracy: return 3;
        case ErrorClass::region: return 3;
        case ErrorClass::off_hyperplane: return 4;
        case ErrorClass::unsupported_lerch: return 5;
    }
    return 1;
}

const char* error_name(ErrorClass cls) {
    switch (cls) {
        case ErrorClass::usage: return "usage";
        case ErrorClass::pole_proximity: return "pole-proximity";
        case ErrorClass::conditioning: return "conditioning";
        case ErrorClass::accuracy: return "accuracy";
        case ErrorClass::region: return "region";
        case ErrorClass::off_hyperplane: return "off-hyperplane";
        case ErrorClass::unsupported_lerch: return "unsupported-lerch";
    }
    return "error";
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

// Complex entries: a, a+bi, a-bi (no spaces).
Complex parse_complex(const std::string& tok) {
    static const std::regex re(
        R"(^([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)(?:([+-][0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)i)?$)");
    std::smatch m;
    if (!std::regex_match(tok, m, re))
        throw EvalError(ErrorClass::usage, "cannot parse complex number '" + tok + "'");
    double re_part = std::stod(m[1].str());
    double im_part = m[2].matched ? std::stod(m[2].str()) : 0.0;
    return Complex(re_part, im_part);
}

struct RealEntry {
    double value;
    std::optional<Rational> exact;
};

// Reals accept exact fractions "p/q" (routed to exact paths) or decimals.
RealEntry parse_real(const std::string& tok) {
    if (auto r = parse_rational(tok)) return {r->to_double(), r};
    try {
        std::size_t used = 0;
        double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return {v, std::nullopt};
    } catch (const std::exception&) {
        throw EvalError(ErrorClass::usage, "cannot parse real number '" + tok + "'");
    }
}

std::vector<RealEntry> parse_real_list(const std::string& s, int expect, const char* what) {
    auto toks = split_commas(s);
    if (expect > 0 && static_cast<int>(toks.size()) != expect)
        throw EvalError(ErrorClass::usage,
                        std::string(what) + " needs " + std::to_string(expect) + " entries");
    std::vector<RealEntry> out;
    for (const auto& t : toks) out.push_back(parse_real(t));
    return out;
}

TwistParams make_params(const std::string& lambda_str, const std::string& alpha_str, int depth) {
    auto lam = lambda_str.empty()
                   ? std::vector<RealEntry>(depth, RealEntry{0.0, Rational(0)})
                   : parse_real_list(lambda_str, depth, "--lambda");
    auto alp = alpha_str.empty()
                   ? std::vector<RealEntry>(depth, RealEntry{0.0, Rational(0)})
                   : parse_real_list(alpha_str, depth, "--alpha");
    Eigen::VectorXd l(depth), a(depth);
    std::vector<std::optional<Rational>> le(depth), ae(depth);
    for (int i = 0; i < depth; ++i) {
        l[i] = lam[i].value;
        le[i] = lam[i].exact;
        a[i] = alp[i].value;
        ae[i] = alp[i].exact;
    }
    return TwistParams(l, a, le, ae);
}

EvalPoint make_point(const std::string& s_str, int depth) {
    auto toks = split_commas(s_str);
    if (static_cast<int>(toks.size()) != depth)
        throw EvalError(ErrorClass::usage, "--s/--point needs depth-many entries");
    Eigen::VectorXcd v(depth);
    for (int i = 0; i < depth; ++i) v[i] = parse_complex(toks[i]);
    return EvalPoint(v);
}

struct CliConfig {
    double eps = 1e-10;
    int max_k = 200;
    double max_terms = 1e7;
    double pole_tolerance = 1e-8;
    int threads = 1;
    std::string output = "json";

    TruncationPolicy policy() const {
        TruncationPolicy p;
        p.eps = eps;
        p.max_k = max_k;
        p.max_terms = max_terms;
        p.pole_tolerance = pole_tolerance;
        return p;
    }

    json to_json() const {
        return json{{"eps", eps},
                    {"max_k", max_k},
                    {"max_terms", max_terms},
                    {"pole_tolerance", pole_tolerance},
                    {"threads", threads},
                    {"output", output}};
    }
};

// Plain key=value file, # comments; unknown keys rejected. Flags override.
void load_config_file(CliConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw EvalError(ErrorClass::usage, "cannot open config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string t) {
            auto b = t.find_first_not_of(" \t\r");
            auto e = t.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw EvalError(ErrorClass::usage,
                            "config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key == "eps") cfg.eps = std::stod(val);
        else if (key == "max_k") cfg.max_k = std::stoi(val);
        else if (key == "max_terms") cfg.max_terms = std::stod(val);
        else if (key == "pole_tolerance") cfg.pole_tolerance = std::stod(val);
        else if (key == "threads") cfg.threads = std::stoi(val);
        else if (key == "output") cfg.output = val;
        else
            throw EvalError(ErrorClass::usage, "config: unknown key '" + key + "'");
    }
    if (cfg.eps <= 0 || cfg.max_k <= 0 || cfg.max_terms <= 0 || cfg.pole_tolerance <= 0 ||
        cfg.threads <= 0)
        throw EvalError(ErrorClass::usage, "config: all numeric fields must be positive");
}

json value_json(const EvalResult& r) {
    return json{{"value", {{"re", r.value.real()}, {"im", r.value.imag()}}},
                {"error_bound", r.error_bound},
                {"region_index", r.region_index},
                {"diagnostics",
                 {{"terms_summed", r.diagnostics.terms_summed},
                  {"cache_hits", r.diagnostics.cache_hits},
                  {"evaluations", r.diagnostics.evaluations},
                  {"recursion_depth", r.diagnostics.recursion_depth}}},
                {"warnings", json::array()}};
}

void emit(const json& doc, const CliConfig& cfg) {
    if (cfg.output == "json") {
        std::cout << doc.dump(2) << "\n";
    } else if (cfg.output == "csv") {
        if (doc.contains("value"))
            std::cout << doc["value"]["re"].dump() << "," << doc["value"]["im"].dump() << ","
                      << doc["error_bound"].dump() << "\n";
        else
            std::cout << doc.dump() << "\n";
    } else {
        if (doc.contains("value"))
            std::cout << "value = " << doc["value"]["re"].dump() << " + "
                      << doc["value"]["im"].dump() << "i   (error bound "
                      << doc["error_bound"].dump() << ")\n";
        else
            std::cout << doc.dump(2) << "\n";
    }
}

json kset_json(const KSet& ks, int enumerate_bound) {
    json j;
    j["description"] = ks.describe();
    j["enumerated_up_to"] = enumerate_bound;
    j["k_values"] = ks.enumerate(enumerate_bound);
    return j;
}

json report_json(const SingularityReport& rep, int enumerate_bound) {
    json fams = json::array();
    for (const auto& f : rep.families) {
        fams.push_back(json{{"i", f.i},
                            {"k_set", kset_json(f.k_set, enumerate_bound)},
                            {"certainty", to_string(f.certainty)}});
    }
    return json{{"status", to_string(rep.status)},
                {"families", fams},
                {"integer_indices", rep.integer_indices},
                {"k_set_indeterminate", rep.k_set_indeterminate}};
}

// ----- verify suites ---------------------------------------------------

struct VerifyCase {
    std::string name;
    bool passed;
    std::string detail;
};

using CaseFn = std::function<VerifyCase()>;

std::vector<VerifyCase> run_cases(std::vector<CaseFn>& fns, int threads) {
    std::vector<VerifyCase> results(fns.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < fns.size(); ++i) results[i] = fns[i]();
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= fns.size()) return;
                results[i] = fns[i]();
            }
        });
    for (auto& th : pool) th.join();
    return results;
}

TwistParams random_params(std::mt19937_64& rng, int depth, bool hurwitz_head) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Eigen::VectorXd l(depth), a(depth);
    for (int i = 0; i < depth; ++i) {
        l[i] = (i == 0 && hurwitz_head) ? 0.0 : std::floor(u01(rng) * 8.0) / 8.0;
        a[i] = std::floor(u01(rng) * 6.0) / 8.0;   // keep |alpha2-alpha1| <= 5/8
    }
    return TwistParams(l, a);
}

EvalPoint random_interior_point(std::mt19937_64& rng, int depth) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXcd v(depth);
    double prev_sum_min = 0.0;
    double acc = 0.0;
    for (int i = 0; i < depth; ++i) {
        // keep Re partial sums >= i + 2.2 so direct summation is comfortable
        double target = (i + 1) + 2.2 + 1.5 * u(rng);
        double re = target - acc;
        if (i + 1 < depth) re = std::max(re, 0.3);
        double im = (u(rng) - 0.5) * 2.0;
        v[i] = Complex(re, im);
        acc += re;
        prev_sum_min = acc;
    }
    (void)prev_sum_min;
    return EvalPoint(v);
}

std::vector<CaseFn> suite_ramanujan(double eps) {
    std::vector<CaseFn> fns;
    for (Complex s : {Complex(2, 0), Complex(3.5, 0), Complex(2, 1.7)}) {
        fns.push_back([s, eps]() -> VerifyCase {
            double r = ramanujan_residual(s, 60, eps);
            char buf[128];
            std::snprintf(buf, sizeof buf, "residual %.3e at s=(%g,%g)", r, s.real(), s.imag());
            return {"ramanujan", r <= 1e-10, buf};
        });
    }
    return fns;
}

std::vector<CaseFn> suite_identity(std::mt19937_64& rng, int cases, int max_depth,
                                   const TruncationPolicy& pol) {
    std::vector<CaseFn> fns;
    for (int depth = 2; depth <= std::max(2, max_depth); ++depth) {
        for (int c = 0; c < cases; ++c) {
            TwistParams params = random_params(rng, depth, c % 2 == 0);
            EvalPoint pt = random_interior_point(rng, depth);
            fns.push_back([params, pt, pol]() -> VerifyCase {
                double r = identity_residual(params, pt, 60, pol);
                char buf[64];
                std::snprintf(buf, sizeof buf, "residual %.3e (depth %d)", r, params.depth);
                return {"identity", r <= 1e-8, buf};
            });
        }
    }
    return fns;
}

std::vector<CaseFn> suite_overlap(std::mt19937_64& rng, int cases, int max_depth,
                                  const TruncationPolicy& pol) {
    std::vector<CaseFn> fns;
    for (int depth = 1; depth <= std::max(1, max_depth); ++depth) {
        for (int c = 0; c < std::max(1, cases / 2); ++c) {
            TwistParams params = random_params(rng, depth, c % 2 == 0);
            EvalPoint pt = random_interior_point(rng, depth);
            fns.push_back([params, pt, pol]() -> VerifyCase {
                EvalResult a = eval_direct(params, pt, pol);
                EvalResult b = eval_continued(params, pt, pol);
                double diff = std::abs(a.value - b.value);
                double allow = a.error_bound + b.error_bound;
                char buf[96];
                std::snprintf(buf, sizeof buf, "|direct-continued| %.3e vs bounds %.3e", diff,
                              allow);
                return {"overlap", diff <= allow, buf};
            });
        }
    }
    return fns;
}

std::vector<CaseFn> suite_matrix(std::mt19937_64& rng, int cases) {
    std::vector<CaseFn> fns;
    std::uniform_int_distribution<int> num(-9, 9), den(1, 9), kdist(0, 10);
    auto rnd_rational = [&rng, &num, &den]() mutable {
        return Rational(num(rng), den(rng));
    };
    for (int c = 0; c < cases; ++c) {
        Rational d = Rational(num(rng), 10 + (c % 5));
        Rational t = rnd_rational() + Rational(1, 7);   // avoid small-integer diagonals
        int q = 2 + (c % 9);
        fns.push_back([d, t, q]() -> VerifyCase {
            try {
                Rational r = verify_inverse_pair<Rational>(d, t, q);
                return {"matrix-inverse", r.is_zero(), "A1*B == A2 exactly, q=" + std::to_string(q)};
            } catch (const EvalError& e) {
                return {"matrix-inverse", false, e.what()};
            }
        });
    }
    for (int c = 0; c < cases; ++c) {
        Rational x = rnd_rational() + Rational(2, 11);
        Rational y = rnd_rational() + Rational(3, 13);
        Rational al(std::abs(num(rng)) % 7, 8), be(std::abs(num(rng)) % 7, 8),
            ga(std::abs(num(rng)) % 7, 8);
        int k = kdist(rng);
        fns.push_back([x, y, al, be, ga, k]() -> VerifyCase {
            try {
                Rational lhs = two_prod_oracle<Rational>(x, y, al, be, ga, k);
                std::vector<Rational> alphas{al, be, ga};
                std::vector<Rational> ts{x, y};
                Rational rhs = first_row_chain<Rational>(alphas, 3, ts, k);
                return {"matrix-twoprod", lhs == rhs, "closed form == chain, k=" + std::to_string(k)};
            } catch (const EvalError& e) {
                return {"matrix-twoprod", false, e.what()};
            }
        });
    }
    return fns;
}

std::vector<CaseFn> suite_bernoulli() {
    std::vector<CaseFn> fns;
    fns.push_back([]() -> VerifyCase {
        auto polys = bernoulli_polys(41);
        for (int n = 0; n + 1 <= 41; ++n) {
            RationalVector d = poly_derivative(polys[n + 1].coeffs);
            for (int j = 0; j <= n; ++j)
                if (d[j] != Rational(n + 1) * polys[n].coeffs[j])
                    return {"bernoulli-derivative", false, "fails at n=" + std::to_string(n)};
        }
        return {"bernoulli-derivative", true, "B'_{n+1} = (n+1) B_n for n <= 40"};
    });
    fns.push_back([]() -> VerifyCase {
        auto polys = bernoulli_polys(40);
        for (int n = 0; n <= 40; ++n) {
            RationalVector shifted = poly_shift_by_one(polys[n].coeffs);
            for (int j = 0; j <= n; ++j) {
                Rational expect = polys[n].coeffs[j];
                if (j == n - 1) expect += Rational(n);   // n t^{n-1}
                if (shifted[j] != expect)
                    return {"bernoulli-difference", false, "fails at n=" + std::to_string(n)};
            }
        }
        return {"bernoulli-difference", true, "B_n(t+1)-B_n(t) = n t^{n-1} for n <= 40"};
    });
    fns.push_back([]() -> VerifyCase {
        auto polys = bernoulli_polys(40);
        for (int n = 0; n <= 40; ++n) {
            RationalVector ref = poly_compose_one_minus(polys[n].coeffs);
            for (int j = 0; j <= n; ++j) {
                Rational expect = polys[n].coeffs[j];
                if (n % 2 == 1) expect = -expect;
                if (ref[j] != expect)
                    return {"bernoulli-symmetry", false, "fails at n=" + std::to_string(n)};
            }
        }
        return {"bernoulli-symmetry", true, "B_n(1-t) = (-1)^n B_n(t) for n <= 40"};
    });
    fns.push_back([]() -> VerifyCase {
        auto polys = bernoulli_polys(41);
        for (int n = 1; n <= 40; ++n) {
            if (poly_degree(poly_gcd(polys[n].coeffs, polys[n + 1].coeffs)) != 0)
                return {"bernoulli-coprime", false, "gcd(B_n,B_{n+1}) != 1 at n=" + std::to_string(n)};
            if (poly_degree(poly_gcd(polys[n].coeffs, poly_derivative(polys[n].coeffs))) != 0)
                return {"bernoulli-squarefree", false, "gcd(B_n,B'_n) != 1 at n=" + std::to_string(n)};
        }
        return {"bernoulli-coprime", true, "gcd(B_n,B_{n+1}) = gcd(B_n,B'_n) = 1 for n <= 40"};
    });
    fns.push_back([]() -> VerifyCase {
        for (int n = 1; n <= 30; ++n) {
            auto roots = bernoulli_rational_roots(n);
            std::vector<Rational> expect;
            if (n == 1) expect = {Rational(1, 2)};
            else if (n % 2 == 1) expect = {Rational(0), Rational(1, 2), Rational(1)};
            if (roots != expect)
                return {"bernoulli-roots", false, "sieve mismatch at n=" + std::to_string(n)};
        }
        return {"bernoulli-roots", true, "rational-root sieve matches for n <= 30"};
    });
    return fns;
}

int cmd_verify(const CliConfig& cfg, const std::string& suite, uint64_t seed, int cases,
               int max_depth) {
    TruncationPolicy pol = cfg.policy();
    std::mt19937_64 rng(seed);
    std::vector<CaseFn> fns;
    auto add = [&](std::vector<CaseFn> more) {
        for (auto& f : more) fns.push_back(std::move(f));
    };
    if (suite == "all" || suite == "ramanujan") add(suite_ramanujan(pol.eps));
    if (suite == "all" || suite == "identity") add(suite_identity(rng, cases, max_depth, pol));
    if (suite == "all" || suite == "overlap") add(suite_overlap(rng, cases, max_depth, pol));
    if (suite == "all" || suite == "matrix") add(suite_matrix(rng, std::max(5, cases / 2)));
    if (suite == "all" || suite == "bernoulli") add(suite_bernoulli());
    if (fns.empty()) {
        std::cerr << "unknown suite '" << suite << "'\n";
        return 1;
    }

    auto results = run_cases(fns, cfg.threads);
    int passed = 0;
    for (const auto& r : results)
        if (r.passed) ++passed;
    for (const auto& r : results)
        if (!r.passed)
            std::cout << "FAIL [" << r.name << "] " << r.detail << " (seed " << seed << ")\n";
    std::cout << passed << "/" << results.size() << " passed\n";
    return passed == static_cast<int>(results.size()) ? 0 : 3;
}

int cmd_bench(const CliConfig& cfg, int max_depth, double eps) {
    TruncationPolicy pol = cfg.policy();
    pol.eps = eps;
    using clock = std::chrono::steady_clock;
    auto ms_since = [](clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    };

    std::printf("%-34s %12s %12s\n", "case", "value.re", "ms");
    auto bench_one = [&](const std::string& name, auto&& fn) {
        auto t0 = clock::now();
        EvalResult r = fn();
        std::printf("%-34s %12.8f %12.3f\n", name.c_str(), r.value.real(), ms_since(t0));
    };

    for (int depth = 1; depth <= max_depth; ++depth) {
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(depth);
        TwistParams params(zero, zero);
        Eigen::VectorXcd deep(depth), shallow(depth);
        for (int i = 0; i < depth; ++i) {
            deep[i] = Complex(i == 0 ? depth + 6.0 : 1.5, 0.0);
            shallow[i] = Complex(i == 0 ? 0.25 - depth : 0.75, 0.25);
        }
        bench_one("eval_direct depth " + std::to_string(depth),
                  [&] { return eval_direct(params, EvalPoint(deep), pol); });
        bench_one("eval_continued deep depth " + std::to_string(depth),
                  [&] { return eval_continued(params, EvalPoint(deep), pol); });
        bench_one("eval_continued off-region depth " + std::to_string(depth),
                  [&] { return eval_continued(params, EvalPoint(shallow), pol); });
    }
    auto t0 = clock::now();
    Complex em = euler_maclaurin_hurwitz(Complex(-3.5, 2.0), 1.0, eps);
    std::printf("%-34s %12.8f %12.3f\n", "euler_maclaurin_hurwitz", em.real(), ms_since(t0));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiple Lerch/Hurwitz zeta toolkit"};
    app.require_subcommand(1);
    app.fallthrough(true);

    CliConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "key=value config file");
    app.add_option("--eps", cfg.eps, "target accuracy");
    app.add_option("--max-k", cfg.max_k, "series truncation cap");
    app.add_option("--max-terms", cfg.max_terms, "direct summation budget");
    app.add_option("--pole-tolerance", cfg.pole_tolerance, "pole rejection distance");
    app.add_option("--threads", cfg.threads, "worker threads for verify/bench");
    app.add_option("--output", cfg.output, "json|csv|text");

    int depth = 1;
    std::string lambda_str, alpha_str, s_str, point_str, hyper_str;

    auto* c_eval = app.add_subcommand("eval", "evaluate L_r(lambda; alpha; s)");
    c_eval->add_option("--depth", depth)->required();
    c_eval->add_option("--lambda", lambda_str, "comma list, fractions allowed");
    c_eval->add_option("--alpha", alpha_str, "comma list, fractions allowed");
    c_eval->add_option("--s", s_str, "comma list of complex a+bi")->required();

    auto* c_res = app.add_subcommand("residue", "residue of a multiple Hurwitz zeta along H_{i,k}");
    c_res->add_option("--depth", depth)->required();
    c_res->add_option("--lambda", lambda_str, "must be all zeros if given");
    c_res->add_option("--alpha", alpha_str)->required();
    c_res->add_option("--hyperplane", hyper_str, "i,k")->required();
    c_res->add_option("--point", point_str, "point on the hyperplane")->required();

    auto* c_sing = app.add_subcommand("singularities", "singularity report for a parameter tuple");
    c_sing->add_option("--depth", depth)->required();
    c_sing->add_option("--lambda", lambda_str);
    c_sing->add_option("--alpha", alpha_str);

    int bn = 10;
    std::string bt_str, zd_str, apostol_str;
    auto* c_bern = app.add_subcommand("bernoulli", "Bernoulli polynomial utilities");
    c_bern->add_option("--n", bn, "degree");
    c_bern->add_option("--eval", bt_str, "evaluate B_n at a rational/real t");
    c_bern->add_option("--zero-set", zd_str, "K = {n : B_n(d) = 0} for d");
    c_bern->add_option("--apostol", apostol_str, "a,c: P_0..P_n(a,c)");

    std::string suite = "all";
    uint64_t seed = 1;
    int cases = 20, max_depth = 3;
    auto* c_verify = app.add_subcommand("verify", "identity/oracle verification suites");
    c_verify->add_option("--suite", suite, "all|ramanujan|identity|overlap|matrix|bernoulli");
    c_verify->add_option("--seed", seed);
    c_verify->add_option("--cases", cases);
    c_verify->add_option("--max-depth", max_depth)->check(CLI::Range(1, 4));

    double bench_eps = 1e-8;
    int bench_depth = 3;
    auto* c_bench = app.add_subcommand("bench", "timing table across evaluators");
    c_bench->add_option("--depth", bench_depth)->check(CLI::Range(1, 4));
    c_bench->add_option("--eps", bench_eps);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            CliConfig file_cfg;
            load_config_file(file_cfg, config_path);
            // flags override the file
            CliConfig merged = file_cfg;
            if (app.count("--eps")) merged.eps = cfg.eps;
            if (app.count("--max-k")) merged.max_k = cfg.max_k;
            if (app.count("--max-terms")) merged.max_terms = cfg.max_terms;
            if (app.count("--pole-tolerance")) merged.pole_tolerance = cfg.pole_tolerance;
            if (app.count("--threads")) merged.threads = cfg.threads;
            if (app.count("--output")) merged.output = cfg.output;
            cfg = merged;
        }
        if (cfg.eps <= 0 || cfg.max_k <= 0 || cfg.max_terms <= 0 || cfg.pole_tolerance <= 0 ||
            cfg.threads <= 0)
            throw EvalError(ErrorClass::usage, "all numeric config fields must be positive");

        if (c_eval->parsed()) {
            TwistParams params = make_params(lambda_str, alpha_str, depth);
            EvalPoint pt = make_point(s_str, depth);
            EvalResult r = eval_continued(params, pt, cfg.policy());
            json doc = value_json(r);
            doc["input"] = {{"depth", depth},
                            {"lambda", lambda_str.empty() ? "0" : lambda_str},
                            {"alpha", alpha_str.empty() ? "0" : alpha_str},
                            {"s", s_str}};
            doc["config"] = cfg.to_json();
            emit(doc, cfg);
            return 0;
        }
        if (c_res->parsed()) {
            TwistParams params = make_params(lambda_str, alpha_str, depth);
            if (!params.is_hurwitz())
                throw EvalError(ErrorClass::unsupported_lerch,
                                "residue: only Hurwitz (lambda = 0) residues are supported");
            auto hk = split_commas(hyper_str);
            if (hk.size() != 2) throw EvalError(ErrorClass::usage, "--hyperplane needs i,k");
            Hyperplane h(std::stoi(hk[0]), std::stoi(hk[1]));
            EvalPoint pt = make_point(point_str, depth);
            EvalResult r = residue_hurwitz(params, h, pt, cfg.policy());
            json doc = value_json(r);
            doc["hyperplane"] = {{"i", h.i}, {"k", h.k}};
            doc["input"] = {{"depth", depth}, {"alpha", alpha_str}, {"point", point_str}};
            doc["config"] = cfg.to_json();
            emit(doc, cfg);
            return 0;
        }
        if (c_sing->parsed()) {
            TwistParams params = make_params(lambda_str, alpha_str, depth);
            SingularityReport rep =
                params.is_hurwitz() ? classify_hurwitz(params) : classify_lerch(params);
            json doc = report_json(rep, 20);
            doc["input"] = {{"depth", depth},
                            {"lambda", lambda_str.empty() ? "0" : lambda_str},
                            {"alpha", alpha_str.empty() ? "0" : alpha_str}};
            emit(doc, cfg);
            return 0;
        }
        if (c_bern->parsed()) {
            json doc;
            doc["n"] = bn;
            if (!apostol_str.empty()) {
                auto toks = split_commas(apostol_str);
                if (toks.size() != 2) throw EvalError(ErrorClass::usage, "--apostol needs a,c");
                double a = parse_real(toks[0]).value;
                Complex c = parse_complex(toks[1]);
                auto ps = apostol_polys(bn, a, c);
                json arr = json::array();
                for (const auto& p : ps) arr.push_back(json{{"re", p.real()}, {"im", p.imag()}});
                doc["apostol"] = arr;
            } else if (!zd_str.empty()) {
                RealEntry d = parse_real(zd_str);
                ZeroIndexSet z = d.exact ? zero_index_set(*d.exact)
                                         : zero_index_set_numeric(d.value, std::max(bn, 20));
                doc["zero_set"] = z.describe();
            } else if (!bt_str.empty()) {
                RealEntry t = parse_real(bt_str);
                if (t.exact) {
                    doc["value"] = bernoulli_eval(bn, *t.exact).str();
                } else {
                    doc["value"] = bernoulli_eval(bn, t.value);
                }
            } else {
                json arr = json::array();
                for (const auto& c : bernoulli_poly(bn).coeffs) arr.push_back(c.str());
                doc["coefficients"] = arr;
            }
            emit(doc, cfg);
            return 0;
        }
        if (c_verify->parsed()) return cmd_verify(cfg, suite, seed, cases, max_depth);
        if (c_bench->parsed()) return cmd_bench(cfg, bench_depth, bench_eps);
    } catch (const EvalError& e) {
        json doc{{"error", error_name(e.cls())}, {"message", e.what()}};
        if (e.achieved_bound() >= 0) doc["achieved_bound"] = e.achieved_bound();
        std::cout << doc.dump(2) << "\n";
        return exit_code_for(e.cls());
    } catch (const std::exception& e) {
        json doc{{"error", "usage"}, {"message", e.what()}};
        std::cout << doc.dump(2) << "\n";
        return 1;
    }
    return 1;
}
