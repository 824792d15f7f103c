#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "supertroesch/supertroesch.hpp"

namespace supertroesch::cli {

using json = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitUsage = 64;

enum class Format { Json, Csv, Text };

struct RunConfig {
    int p = 3;
    int r = 1;
    int n = 1;                  // polynomial degree is n p^r unless `degree` is set
    std::optional<int> degree;  // explicit polynomial degree
    std::string space = "k^{1|1}";
    int max_degree = 8;
    int source_parity = 0;
    int target_parity = 0;
    int n_splices = 2;
    std::optional<long long> budget;
    Format format = Format::Text;
    std::string suite = "all";

    int polynomial_degree() const { return degree ? *degree : n * static_cast<int>(int_pow(p, r)); }
};

// Sets SUPERTROESCH_BUDGET for one command and restores the previous value.
class BudgetOverride {
public:
    explicit BudgetOverride(std::optional<long long> budget) : active_(budget.has_value()) {
        if (!active_) return;
        if (const char* old = std::getenv("SUPERTROESCH_BUDGET")) old_ = old;
        setenv("SUPERTROESCH_BUDGET", std::to_string(*budget).c_str(), 1);
    }
    ~BudgetOverride() {
        if (!active_) return;
        if (old_) setenv("SUPERTROESCH_BUDGET", old_->c_str(), 1);
        else unsetenv("SUPERTROESCH_BUDGET");
    }
    BudgetOverride(const BudgetOverride&) = delete;
    BudgetOverride& operator=(const BudgetOverride&) = delete;

private:
    bool active_;
    std::optional<std::string> old_;
};

namespace detail {

inline std::string pd_text(ParityDims d) { return "(" + std::to_string(d.first) + "," + std::to_string(d.second) + ")"; }

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

inline std::string complex_label(int p, int degree, int r, const std::string& space) {
    return "B_" + std::to_string(degree) + "(" + std::to_string(r) + ")(" + space + ") over F_" + std::to_string(p);
}

inline std::string twist_label(int parity, int r) { return "I_" + std::to_string(parity) + "^(" + std::to_string(r) + ")"; }

}  // namespace detail

inline int cmd_cohomology(const RunConfig& cfg, std::ostream& out) {
    const SuperSpace u = parse_space(cfg.space, cfg.p);
    const int degree = cfg.polynomial_degree();
    const TheoremReport rep = verify_theorem_B_degree(cfg.p, degree, cfg.r, u);
    const char* status = rep.ok() ? "PASS" : "FAIL";
    switch (cfg.format) {
        case Format::Json: {
            json rows = json::array();
            for (int s = 1; s < cfg.p; ++s)
                for (const auto& [i, d] : rep.table.row(s)) rows.push_back({{"s", s}, {"degree", i}, {"even", d.first}, {"odd", d.second}});
            json j = {{"schema", 1},
                      {"command", "cohomology"},
                      {"p", cfg.p},
                      {"r", cfg.r},
                      {"degree", degree},
                      {"space", cfg.space},
                      {"cohomology", rows},
                      {"normal", rep.normal},
                      {"checks", {{"vanishing", rep.vanishing}, {"dims", rep.dims}, {"eta_cocycles", rep.eta_cocycles}, {"eta_span", rep.eta_span}}},
                      {"status", status}};
            if (!rep.ok()) j["first_failure"] = rep.first_failure;
            out << j.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "s,degree,even,odd\n";
            for (int s = 1; s < cfg.p; ++s)
                for (const auto& [i, d] : rep.table.row(s)) out << s << "," << i << "," << d.first << "," << d.second << "\n";
            break;
        case Format::Text:
            out << detail::complex_label(cfg.p, degree, cfg.r, cfg.space) << "\n";
            for (int s = 1; s < cfg.p; ++s) {
                out << "H_[" << s << "]:";
                const auto row = rep.table.row(s);
                if (row.empty()) out << " 0";
                for (const auto& [i, d] : row) out << " H^" << i << "=" << detail::pd_text(d);
                out << "\n";
            }
            out << "normal: " << detail::yes_no(rep.normal) << "\n";
            out << "checks: " << status;
            if (!rep.ok()) out << " (" << rep.first_failure << ")";
            out << "\n";
            break;
    }
    return rep.ok() ? kExitOk : kExitFailure;
}

inline int cmd_decompose(const RunConfig& cfg, std::ostream& out) {
    const SuperSpace u = parse_space(cfg.space, cfg.p);
    const int degree = cfg.polynomial_degree();
    const PComplex c = build_B(cfg.p, degree, cfg.r, u);
    validate(c);
    const CyclicDecomposition d = decompose_cyclic(c);
    const bool normal = is_normal(d);
    switch (cfg.format) {
        case Format::Json: {
            json blocks = json::array();
            for (const auto& b : d.blocks)
                blocks.push_back({{"shift", b.shift}, {"length", b.length}, {"parity", b.parity}, {"multiplicity", b.multiplicity}});
            json j = {{"schema", 1}, {"command", "decompose"}, {"p", cfg.p},          {"r", cfg.r},
                      {"degree", degree}, {"space", cfg.space},  {"alpha", d.alpha}, {"blocks", blocks},
                      {"normal", normal}};
            out << j.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "shift,length,parity,multiplicity\n";
            for (const auto& b : d.blocks) out << b.shift << "," << b.length << "," << b.parity << "," << b.multiplicity << "\n";
            break;
        case Format::Text:
            out << detail::complex_label(cfg.p, degree, cfg.r, cfg.space) << "\n";
            if (d.blocks.empty()) out << "no blocks\n";
            for (const auto& b : d.blocks)
                out << "block shift=" << b.shift << " length=" << b.length << " parity=" << b.parity << " multiplicity=" << b.multiplicity << "\n";
            out << "normal: " << detail::yes_no(normal) << "\n";
            break;
    }
    return kExitOk;
}

inline int cmd_ext_table(const RunConfig& cfg, std::ostream& out) {
    const ExtTable t = ext_table(cfg.p, cfg.r, cfg.max_degree, cfg.source_parity, cfg.target_parity);
    const bool ok = t.differentials_vanish && t.matches_basis;
    std::map<int, std::vector<const ExtClass*>> by_degree;
    for (const auto& c : t.classes) by_degree[c.degree].push_back(&c);
    switch (cfg.format) {
        case Format::Json: {
            json dims = json::array(), classes = json::array();
            for (auto [s, d] : t.dims) dims.push_back({{"s", s}, {"dim", d}});
            for (const auto& c : t.classes)
                classes.push_back({{"degree", c.degree}, {"name", c.name}, {"summand", c.summand}, {"element", c.element}});
            json j = {{"schema", 1},
                      {"command", "ext-table"},
                      {"p", cfg.p},
                      {"r", cfg.r},
                      {"source_parity", cfg.source_parity},
                      {"target_parity", cfg.target_parity},
                      {"max_degree", cfg.max_degree},
                      {"dims", dims},
                      {"classes", classes},
                      {"differentials_vanish", t.differentials_vanish},
                      {"matches_basis", t.matches_basis},
                      {"status", ok ? "PASS" : "FAIL"}};
            out << j.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "s,dim,classes\n";
            for (auto [s, d] : t.dims) {
                std::string names;
                for (const auto* c : by_degree[s]) names += (names.empty() ? "" : " ") + c->name;
                out << s << "," << d << "," << detail::csv_field(names) << "\n";
            }
            break;
        case Format::Text: {
            out << "Ext^s(" << detail::twist_label(cfg.source_parity, cfg.r) << ", " << detail::twist_label(cfg.target_parity, cfg.r)
                << ") over F_" << cfg.p << ", s <= " << cfg.max_degree << "\n";
            std::string dims;
            for (auto [s, d] : t.dims) {
                out << "s=" << s << " dim=" << d;
                for (const auto* c : by_degree[s]) out << " " << c->name;
                out << "\n";
                dims += (dims.empty() ? "" : ",") + std::to_string(d);
            }
            out << "dims: " << dims << "\n";
            out << "differentials vanish: " << detail::yes_no(t.differentials_vanish) << "\n";
            out << "classes match basis: " << detail::yes_no(t.matches_basis) << "\n";
            break;
        }
    }
    return ok ? kExitOk : kExitFailure;
}

inline int cmd_ring(const RunConfig& cfg, std::ostream& out) {
    const RingReport rep = ring_relations(cfg.p, cfg.r);
    switch (cfg.format) {
        case Format::Json: {
            json rel = json::array();
            for (const auto& x : rep.relations) rel.push_back({{"line", x.line}, {"holds", x.holds}});
            json j = {{"schema", 1}, {"command", "ring"}, {"p", cfg.p}, {"r", cfg.r}, {"relations", rel}, {"skipped", rep.skipped}};
            out << j.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "relation,holds\n";
            for (const auto& x : rep.relations) out << detail::csv_field(x.line) << "," << (x.holds ? "true" : "false") << "\n";
            for (const auto& s : rep.skipped) out << detail::csv_field(s) << ",skipped\n";
            break;
        case Format::Text:
            for (const auto& x : rep.relations) out << x.line << (x.holds ? "" : "   [does not hold]") << "\n";
            for (const auto& s : rep.skipped) out << "skipped: " << s << "\n";
            break;
    }
    if (!rep.ok()) return kExitFailure;
    return rep.skipped.empty() ? kExitOk : kExitBudget;
}

// One verified item of a suite; `budget` marks an item abandoned at the size limit.
struct SuiteItem {
    std::string suite;
    std::string name;
    bool pass = false;
    bool budget = false;
    std::string detail;
};

namespace detail {

inline void run_item(std::vector<SuiteItem>& out, const std::string& suite, const std::string& name, const std::function<std::string()>& body) {
    SuiteItem item{suite, name, false, false, ""};
    try {
        item.detail = body();
        item.pass = item.detail.empty();
    } catch (const BudgetError& e) {
        item.budget = true;
        item.detail = e.what();
    } catch (const Error& e) {
        item.detail = e.what();
    }
    out.push_back(std::move(item));
}

inline std::vector<std::string> theorem_spaces(const RunConfig& cfg) {
    if (cfg.r == 1) return {"k^{1|0}", "k^{0|1}", "k^{1|1}"};
    return {"k^{1|0}", "k^{0|1}"};
}

}  // namespace detail

inline std::vector<SuiteItem> suite_theorem(const RunConfig& cfg) {
    std::vector<SuiteItem> out;
    const int max_n = cfg.p == 3 && cfg.r == 1 ? 3 : 1;
    for (int n = 1; n <= max_n; ++n)
        for (const auto& s : detail::theorem_spaces(cfg))
            detail::run_item(out, "theorem", "n=" + std::to_string(n) + " U=" + s, [&] {
                const TheoremReport rep = verify_theorem_B(cfg.p, n, cfg.r, parse_space(s, cfg.p));
                return rep.ok() ? std::string() : rep.first_failure;
            });
    return out;
}

inline std::vector<SuiteItem> suite_vanishing(const RunConfig& cfg) {
    std::vector<SuiteItem> out;
    const int q = static_cast<int>(int_pow(cfg.p, cfg.r));
    for (int degree = 1; degree <= 5; ++degree) {
        if (degree % q == 0) continue;
        for (const auto& s : detail::theorem_spaces(cfg))
            detail::run_item(out, "vanishing", "degree=" + std::to_string(degree) + " U=" + s, [&] {
                const TheoremReport rep = verify_theorem_B_degree(cfg.p, degree, cfg.r, parse_space(s, cfg.p));
                return rep.ok() ? std::string() : rep.first_failure;
            });
    }
    return out;
}

inline std::vector<SuiteItem> suite_kunneth(const RunConfig& cfg) {
    struct Factor {
        std::string label;
        int degree;
        std::string space;
    };
    const std::vector<Factor> factors = {{"B_1(1)(k^{1|0})", 1, "k^{1|0}"}, {"B_1(1)(k^{0|1})", 1, "k^{0|1}"},
                                         {"B_" + std::to_string(cfg.p) + "(1)(k^{0|1})", cfg.p, "k^{0|1}"}};
    std::vector<SuiteItem> out;
    for (const auto& a : factors)
        for (const auto& b : factors)
            detail::run_item(out, "kunneth", a.label + " (x) " + b.label, [&] {
                const KunnethReport rep = kunneth_check(build_B(cfg.p, a.degree, 1, parse_space(a.space, cfg.p)), build_B(cfg.p, b.degree, 1, parse_space(b.space, cfg.p)));
                return rep.ok() ? std::string() : rep.first_failure;
            });
    return out;
}

inline std::vector<SuiteItem> suite_corollary(const RunConfig& cfg) {
    std::vector<SuiteItem> out;
    for (int n = 1; n <= 2; ++n)
        detail::run_item(out, "corollary", "T(S^" + std::to_string(n) + ") at k^{1|1}", [&] {
            const CorollaryReport rep = verify_corollary_T(cfg.p, n, cfg.r, k_space(1, 1));
            return rep.ok() ? std::string() : rep.first_failure;
        });
    return out;
}

inline std::vector<SuiteItem> suite_epsilon(const RunConfig& cfg) {
    std::vector<SuiteItem> out;
    detail::run_item(out, "epsilon", "splicing map identities at p=" + std::to_string(cfg.p), [&] {
        const EpsilonIdentityReport rep = verify_epsilon_prime_1(cfg.p);
        return rep.ok() ? std::string() : rep.first_failure;
    });
    return out;
}

inline std::vector<SuiteItem> suite_exactness(const RunConfig& cfg) {
    std::vector<SuiteItem> out;
    detail::run_item(out, "exactness", "J(" + std::to_string(cfg.r) + ")(k^{1|1}) with " + std::to_string(cfg.n_splices) + " splices", [&] {
        const ExactnessReport rep = verify_J_exactness(cfg.p, cfg.r, k_space(1, 1), cfg.n_splices);
        return rep.ok() ? std::string() : rep.first_failure;
    });
    return out;
}

inline std::vector<SuiteItem> suite_ext(const RunConfig& cfg) {
    std::vector<SuiteItem> out;
    const int max_degree = 4 * static_cast<int>(int_pow(cfg.p, cfg.r));
    for (int x : {0, 1})
        for (int y : {0, 1})
            detail::run_item(out, "ext", "Ext(" + detail::twist_label(x, cfg.r) + ", " + detail::twist_label(y, cfg.r) + ") through " + std::to_string(max_degree), [&] {
                const ExtTable t = ext_table(cfg.p, cfg.r, max_degree, x, y);
                if (!t.differentials_vanish) return std::string("induced differentials do not vanish");
                if (!t.matches_basis) return std::string("classes do not match the basis");
                for (auto [s, d] : t.dims)
                    if (d != ext_expected_dim(cfg.p, cfg.r, x, y, s)) return "dimension mismatch at s=" + std::to_string(s);
                return std::string();
            });
    return out;
}

inline std::vector<SuiteItem> suite_ring(const RunConfig& cfg) {
    std::vector<SuiteItem> out;
    RingReport rep;
    try {
        rep = ring_relations(cfg.p, cfg.r);
    } catch (const BudgetError& e) {
        out.push_back({"ring", "ring relations", false, true, e.what()});
        return out;
    }
    for (const auto& x : rep.relations) out.push_back({"ring", x.line, x.holds, false, x.holds ? "" : "relation does not hold"});
    for (const auto& s : rep.skipped) out.push_back({"ring", "skipped", false, true, s});
    return out;
}

inline std::vector<SuiteItem> suite_hom(const RunConfig& cfg) {
    std::vector<SuiteItem> out;
    for (int n = 0; n <= 6; ++n)
        detail::run_item(out, "hom", "Hom(Lambda^" + std::to_string(n) + ", S^" + std::to_string(n) + ") at k^{0|1}", [&] {
            const auto d = yoneda_hom_dim(PowerKind::Ext, n, k_space(0, 1));
            const std::pair<int, int> want = n % 2 ? std::pair{0, 1} : std::pair{1, 0};
            if (d != want) return "dims (" + std::to_string(d.first) + "," + std::to_string(d.second) + ")";
            return std::string();
        });
    (void)cfg;
    return out;
}

inline const std::vector<std::pair<std::string, std::function<std::vector<SuiteItem>(const RunConfig&)>>>& suites() {
    static const std::vector<std::pair<std::string, std::function<std::vector<SuiteItem>(const RunConfig&)>>> all = {
        {"theorem", suite_theorem}, {"vanishing", suite_vanishing}, {"kunneth", suite_kunneth},
        {"corollary", suite_corollary}, {"epsilon", suite_epsilon}, {"exactness", suite_exactness},
        {"ext", suite_ext},         {"ring", suite_ring},           {"hom", suite_hom},
    };
    return all;
}

inline std::vector<std::string> suite_names() {
    std::vector<std::string> names;
    for (const auto& [name, fn] : suites()) names.push_back(name);
    names.push_back("all");
    return names;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    std::vector<SuiteItem> items;
    for (const auto& [name, fn] : suites())
        if (cfg.suite == "all" || cfg.suite == name) {
            auto got = fn(cfg);
            items.insert(items.end(), got.begin(), got.end());
        }
    if (items.empty()) throw_domain("unknown suite '" + cfg.suite + "'");
    bool failed = false, budget = false;
    for (const auto& i : items) {
        failed = failed || (!i.pass && !i.budget);
        budget = budget || i.budget;
    }
    const std::string verdict = failed ? "FAIL" : budget ? "BUDGET" : "PASS";
    auto status = [](const SuiteItem& i) { return i.pass ? "PASS" : i.budget ? "BUDGET" : "FAIL"; };
    switch (cfg.format) {
        case Format::Json: {
            json rows = json::array();
            for (const auto& i : items) {
                json row = {{"suite", i.suite}, {"item", i.name}, {"status", status(i)}};
                if (!i.detail.empty()) row["detail"] = i.detail;
                rows.push_back(row);
            }
            json j = {{"schema", 1}, {"command", "verify"}, {"suite", cfg.suite}, {"p", cfg.p}, {"r", cfg.r}, {"items", rows}, {"status", verdict}};
            out << j.dump(2) << "\n";
            break;
        }
        case Format::Csv:
            out << "suite,item,status,detail\n";
            for (const auto& i : items)
                out << i.suite << "," << detail::csv_field(i.name) << "," << status(i) << "," << detail::csv_field(i.detail) << "\n";
            break;
        case Format::Text:
            for (const auto& i : items) {
                out << status(i) << " " << i.suite << ": " << i.name;
                if (!i.detail.empty()) out << " (" << i.detail << ")";
                out << "\n";
            }
            out << cfg.suite << ": " << verdict << "\n";
            break;
    }
    return failed ? kExitFailure : budget ? kExitBudget : kExitOk;
}

// Parses `args` (without the program name), runs one subcommand, returns the exit code.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact computations with super Troesch complexes and Ext between Frobenius twists", "supertroesch"};
    app.require_subcommand(1);
    RunConfig cfg;
    const std::map<std::string, Format> formats = {{"json", Format::Json}, {"csv", Format::Csv}, {"text", Format::Text}};

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--p", cfg.p, "odd prime")->capture_default_str();
        sub->add_option("--r", cfg.r, "Frobenius twist")->capture_default_str();
        sub->add_option("--format", cfg.format, "json, csv or text")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case))->capture_default_str();
        sub->add_option("--budget", cfg.budget, "largest graded piece to build");
    };
    auto add_complex = [&](CLI::App* sub) {
        sub->add_option("--n", cfg.n, "polynomial degree in multiples of p^r")->capture_default_str();
        sub->add_option("--degree", cfg.degree, "explicit polynomial degree, overrides --n");
        sub->add_option("--space", cfg.space, "k^{m|n}, Sh(r) or PiSh(r)")->capture_default_str();
    };

    CLI::App* coh = app.add_subcommand("cohomology", "slice cohomology and normality of B(U)");
    add_common(coh);
    add_complex(coh);
    CLI::App* dec = app.add_subcommand("decompose", "cyclic decomposition of B(U)");
    add_common(dec);
    add_complex(dec);
    CLI::App* ext = app.add_subcommand("ext-table", "Ext between parity pieces of the Frobenius twist");
    add_common(ext);
    ext->add_option("--max-deg", cfg.max_degree, "largest Ext degree")->capture_default_str();
    ext->add_option("--source-parity", cfg.source_parity, "parity of the source twist")->check(CLI::Range(0, 1))->capture_default_str();
    ext->add_option("--target-parity", cfg.target_parity, "parity of the target twist")->check(CLI::Range(0, 1))->capture_default_str();
    CLI::App* ring = app.add_subcommand("ring", "multiplicative relations among Ext classes");
    add_common(ring);
    CLI::App* ver = app.add_subcommand("verify", "run verification suites");
    add_common(ver);
    ver->add_option("--suite", cfg.suite, "suite name")->check(CLI::IsMember(suite_names()))->capture_default_str();
    ver->add_option("--n-splices", cfg.n_splices, "splices in the truncated resolution")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        BudgetOverride guard(cfg.budget);
        if (coh->parsed()) return cmd_cohomology(cfg, out);
        if (dec->parsed()) return cmd_decompose(cfg, out);
        if (ext->parsed()) return cmd_ext_table(cfg, out);
        if (ring->parsed()) return cmd_ring(cfg, out);
        return cmd_verify(cfg, out);
    } catch (const BudgetError& e) {
        err << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        if (e.kind() == ErrorKind::Domain || e.kind() == ErrorKind::DimensionMismatch) return kExitUsage;
        return kExitFailure;
    }
}

}  // namespace supertroesch::cli
