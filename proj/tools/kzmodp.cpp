// kzmodp: constructs the p-hypergeometric solutions of the sl2 KZ equations
// over F_p and certifies their defining properties at desk scale.

#include "kzp/cartier.hpp"
#include "kzp/json_io.hpp"
#include "kzp/kzcore.hpp"
#include "kzp/leading.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace {

using namespace kzp;

constexpr int exit_ok = 0;
constexpr int exit_certification_failure = 1;
constexpr int exit_invalid_input = 2;
constexpr int exit_size_guard = 3;

u64 default_max_terms()
{
    if (const char* env = std::getenv("KZMODP_MAX_TERMS")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return (u64)v;
        std::cerr << "warning: ignoring malformed KZMODP_MAX_TERMS\n";
    }
    return Limits{}.max_terms;
}

void write_output(const std::string& text, const std::string& out_path)
{
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) throw std::invalid_argument("cannot open output file " + out_path);
        os << text << "\n";
    }
}

std::vector<int> parse_tuple(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw std::invalid_argument("empty tuple for --l");
    return out;
}

int cmd_pair(u64 p, u64 q, const std::string& format, const std::string& out)
{
    PrimePair pair = classify_pair(p, q);
    if (format == "json") {
        write_output(dump_canonical(pair_to_json(pair)), out);
    } else {
        std::ostringstream os;
        os << "pair (" << p << "," << q << "): type " << pair.pair_type
           << ", k=" << pair.k << ", M=" << pair.M << ", c=" << pair.c;
        if (!pair.type1()) os << "  [type-2 pair: no certification available]";
        write_output(os.str(), out);
    }
    return exit_ok;
}

ModelParams resolve_params(const PrimePair& pair, int g, int n, int r)
{
    if (g <= 0 && n <= 0) throw std::invalid_argument("provide --g or --n");
    if (g > 0) {
        ModelParams prm = params_from_g(pair, g, r);
        if (n > 0 && n != prm.n)
            throw std::invalid_argument("--n is inconsistent with --g (expected n = q*g + 2r - 1)");
        return prm;
    }
    return params_from_n(pair, n, r);
}

int cmd_construct(u64 p, u64 q, int g, int n, int r, const std::string& l_text,
                  const std::string& format, const std::string& out, const Limits& lim)
{
    PrimePair pair = classify_pair(p, q);
    ModelParams prm = resolve_params(pair, g, n, r);
    SolutionIndex L{parse_tuple(l_text)};
    VectorPoly v = construct_solution(pair, prm, L, lim);
    if (format == "json") {
        write_output(dump_canonical(solution_to_json(pair, prm, L, v)), out);
    } else {
        std::ostringstream os;
        os << "I^" << L.to_string() << " over F_" << p << ", n=" << prm.n << ", r=" << prm.r;
        if (v.is_zero()) {
            os << "\n  (zero)";
        } else {
            for (auto& [J, f] : v.components)
                os << "\n  " << J.to_string() << ": " << f.to_string();
        }
        write_output(os.str(), out);
    }
    return exit_ok;
}

int cmd_certify(u64 p, u64 q, int g, int n, int r, const std::string& format,
                const std::string& out, const Limits& lim)
{
    PrimePair pair = classify_pair(p, q);
    if (!pair.type1())
        throw std::invalid_argument("certify: (" + std::to_string(p) + "," + std::to_string(q)
                                    + ") is a type-2 pair; no certification available");
    ModelParams prm = resolve_params(pair, g, n, r);
    if (!mgp_holds(pair, prm))
        throw std::invalid_argument("certify: M - g >= 0 fails for this case");

    std::vector<std::pair<std::string, bool>> checks;
    std::ostringstream report;
    report << "certify p=" << p << " q=" << q << " g=" << *prm.g << " r=" << r
           << " (n=" << prm.n << ", M=" << pair.M << ", c=" << pair.c << ")\n";

    bool sing_ok = true, kz_ok = true, eigen_ok = true;
    for (auto& L : admissible_tuples(pair, prm)) {
        SolutionStore s(pair, prm, L, lim);
        if (!check_singular(s)) { sing_ok = false; report << "  tuple " << L.to_string() << ": singular system FAILED\n"; }
        if (!check_kz(s)) { kz_ok = false; report << "  tuple " << L.to_string() << ": KZ system FAILED\n"; }
        if (!s.is_zero() && !check_eigen(leading_term(s), pair, prm)) {
            eigen_ok = false;
            report << "  tuple " << L.to_string() << ": eigenvector property FAILED\n";
        }
    }
    checks.emplace_back("singular", sing_ok);
    checks.emplace_back("kz", kz_ok);

    RankCertificate cert = certify_rank(pair, prm, lim);
    checks.emplace_back("leading_terms", cert.ok);
    checks.emplace_back("rank", cert.ok && cert.rank == cert.expected_rank);
    checks.emplace_back("eigenvectors", eigen_ok);

    // vanishing outside the admissible range
    bool zero_ok = true;
    {
        int bound = tuple_bound(pair, prm);
        std::vector<int> over(r);
        over[0] = bound + 1;
        for (int i = 1; i < r; ++i) over[i] = r - i;
        SolutionStore szero(pair, prm, SolutionIndex(over), lim);
        if (!szero.is_zero()) zero_ok = false;
        if (r >= 2) {
            std::vector<int> rep(r, 1);
            SolutionStore srep(pair, prm, SolutionIndex(rep), lim);
            if (!srep.is_zero()) zero_ok = false;
        }
    }
    checks.emplace_back("vanishing", zero_ok);

    bool cartier_ok = verify_reconstruction(pair, prm, lim);
    checks.emplace_back("cartier", cartier_ok);

    bool all_ok = cert.ok;
    for (auto& [name, ok] : checks) all_ok = all_ok && ok;

    if (format == "json") {
        write_output(dump_canonical(certificate_to_json(pair, prm, cert, checks)), out);
    } else {
        for (auto& [name, ok] : checks)
            report << "  [" << (ok ? "ok" : "FAIL") << "] " << name << "\n";
        report << "rank " << cert.rank << " (expected " << cert.expected_rank << ")";
        if (!cert.failure.empty()) report << "\n" << cert.failure;
        for (auto& entry : cert.basis) {
            report << "\n  basis " << entry.L.to_string();
            if (entry.nonzero) {
                report << " leading index " << entry.computed.leading_index.to_string();
            }
        }
        report << "\n" << (all_ok ? "PASS" : "FAIL");
        write_output(report.str(), out);
    }
    return all_ok ? exit_ok : exit_certification_failure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact constructor and verifier for KZ solutions over F_p"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string format = "text", out_path;
    u64 max_terms = default_max_terms();
    int jobs = 0;

    app.add_option("--format", format, "output format (text|json)")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--out", out_path, "write output to a file");
    app.add_option("--max-terms", max_terms, "size guard: maximum stored terms per object");
    app.add_option("--jobs", jobs, "worker threads (0 = auto)");

    u64 p = 0, q = 0;
    int g = 0, n = 0, r = 1;
    std::string l_text;

    auto* pair_cmd = app.add_subcommand("pair", "classify a prime pair and derive k, M, c");
    pair_cmd->add_option("p", p, "prime modulus")->required();
    pair_cmd->add_option("q", q, "prime parameter, q < p")->required();

    auto* construct_cmd = app.add_subcommand("construct", "construct a solution and serialize it");
    construct_cmd->add_option("--p", p, "prime modulus")->required();
    construct_cmd->add_option("--q", q, "prime parameter")->required();
    construct_cmd->add_option("--g", g, "geometry parameter (n = q*g + 2r - 1)");
    construct_cmd->add_option("--n", n, "number of tensor factors (alternative to --g)");
    construct_cmd->add_option("--r", r, "weight drop r")->required();
    construct_cmd->add_option("--l", l_text, "cycle tuple, e.g. 2,1")->required();

    auto* certify_cmd = app.add_subcommand("certify", "run the full certification suite for one case");
    certify_cmd->add_option("--p", p, "prime modulus")->required();
    certify_cmd->add_option("--q", q, "prime parameter")->required();
    certify_cmd->add_option("--g", g, "geometry parameter (n = q*g + 2r - 1)");
    certify_cmd->add_option("--n", n, "number of tensor factors (alternative to --g)");
    certify_cmd->add_option("--r", r, "weight drop r")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_invalid_input;
    }

    Limits lim;
    lim.max_terms = max_terms;
    lim.jobs = jobs;

    try {
        if (pair_cmd->parsed()) return cmd_pair(p, q, format, out_path);
        if (construct_cmd->parsed()) return cmd_construct(p, q, g, n, r, l_text, format, out_path, lim);
        if (certify_cmd->parsed()) return cmd_certify(p, q, g, n, r, format, out_path, lim);
    } catch (const SizeGuardError& e) {
        std::cerr << "size guard: " << e.what() << "\n";
        return exit_size_guard;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_invalid_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_certification_failure;
    }
    return exit_invalid_input;
}
