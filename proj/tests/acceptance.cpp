// Acceptance run: one PASS/FAIL line per criterion.  The exit status is
// nonzero only when a required criterion fails; criteria that depend on the
// four-dimensional canonical classification are reported but optional
// unless that classification is supplied (see README).

#include "random_degree.hpp"

#include "fano_forge/chart.hpp"
#include "fano_forge/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace fano_forge;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures_required = 0;

void report(int id, bool required, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << (required ? "" : " (optional)") << ": " << o.detail
              << std::endl;
    if (required && !o.pass) ++failures_required;
}

template <class F>
Outcome guarded(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

std::string rational_text(const Rational& x) {
    std::ostringstream os;
    os << boost::multiprecision::numerator(x);
    if (boost::multiprecision::denominator(x) != 1) os << '/' << boost::multiprecision::denominator(x);
    return os.str();
}

Outcome count_records(std::size_t n, Mode mode, const std::vector<WeightVector>* weights, std::size_t expected) {
    ClassifyOptions opt;
    auto recs = weights ? classify_weight_list(*weights, mode, opt) : classify_all(n, mode, opt);
    std::ostringstream os;
    os << recs.size() << " records, expected " << expected;
    return {recs.size() == expected, os.str()};
}

const char* const kSegments[] = {
    "7/8,7/8", "6/7,6/7", "6/7,7/8", "5/6,5/6", "5/6,7/8", "4/5,4/5", "4/5,5/6", "4/5,6/7", "4/5,7/8", "3/4,3/4",
    "3/4,4/5", "3/4,5/6", "3/4,6/7", "3/4,7/8", "2/3,2/3", "2/3,3/4", "2/3,4/5", "2/3,5/6", "2/3,6/7", "2/3,7/8",
    "1/2,1/2", "1/2,2/3", "1/2,3/4", "1/2,4/5", "1/2,5/6", "1/2,6/7", "1/2,7/8", "1/3,1/3", "1/3,1/2", "1/3,2/3",
    "1/3,3/4", "1/3,5/6", "1/3,6/7", "1/3,7/8", "1/4,1/4", "1/4,1/2", "1/4,3/4", "0,1/4",   "0,1/3",   "0,1/2",
    "0,2/3",   "0,3/4",   "0,4/5",   "0,5/6",   "0,6/7",   "0,7/8"};

// Criteria 3 to 5 from a canonical four-dimensional record file with fine
// blocks, as written by `fano_forge classify` followed by `fano_forge fine`.
void canonical_four(const char* path) {
    if (!path) {
        const char* why = "not run: needs the dimension-4 canonical classification (set FANO_FORGE_CANONICAL4_RECORDS "
                          "to a record file with fine blocks)";
        for (int id = 3; id <= 5; ++id) report(id, false, {false, why});
        return;
    }
    std::vector<cli::Record> recs;
    try {
        recs = cli::read_records_file(path);
    } catch (const std::exception& e) {
        for (int id = 3; id <= 5; ++id) report(id, false, {false, e.what()});
        return;
    }
    std::size_t four = 0;
    std::map<int, std::size_t> by_dim;
    std::map<int, std::set<std::string>> keys;
    std::set<std::string> segments;
    bool complete = true;
    for (auto& r : recs) {
        if (r.dim != 4 || r.mode != Mode::Canonical) continue;
        ++four;
        if (!r.fine) {
            complete = false;
            continue;
        }
        ++by_dim[r.fine->dim];
        keys[r.fine->dim].insert(r.fine->key);
        if (r.fine->segment) segments.insert(rational_text(-r.fine->segment->first) + "," + rational_text(r.fine->segment->second));
    }
    report(3, false, {four == 710450, std::to_string(four) + " records, expected 710450"});
    const std::size_t want[5] = {387310, 112672, 95713, 70130, 44625};
    bool ok = complete;
    std::ostringstream os;
    for (int d = 0; d <= 4; ++d) {
        ok = ok && by_dim[d] == want[d];
        os << (d ? "/" : "") << by_dim[d];
    }
    os << " for dim 0..4, expected 387310/112672/95713/70130/44625";
    report(4, false, {ok, os.str()});
    const std::size_t want_keys[4] = {46, 2178, 7825, 16072};
    std::ostringstream ks;
    ok = complete;
    for (int d = 1; d <= 4; ++d) {
        ok = ok && keys[d].size() == want_keys[d - 1];
        ks << (d > 1 ? "/" : "") << keys[d].size();
    }
    std::set<std::string> expected(std::begin(kSegments), std::end(kSegments));
    ok = ok && segments == expected;
    ks << " keys for dim 1..4, expected 46/2178/7825/16072; segment list " << (segments == expected ? "matches" : "differs");
    report(5, false, {ok, ks.str()});
}

Outcome oracle_equivalence() {
    std::size_t checked = 0, mismatches = 0;
    std::string first;
    auto check = [&](const DegreeMatrix& Q) {
        ++checked;
        if (classify(Q) != lattice_point_oracle(simplex(Q))) {
            if (!mismatches++) first = Q.str();
        }
    };
    for (std::size_t n = 2; n <= 3; ++n)
        for (Mode m : {Mode::Canonical, Mode::Terminal})
            for (auto& c : classify_all(n, m)) check(c.Q);
    const std::size_t full = checked;
    for (int t = 0; t < 10'000; ++t) check(random_degree_matrix(4, 6, 3, 6));
    std::ostringstream os;
    os << full << " dimension 2/3 outputs and " << checked - full << " random dimension-4 degree matrices, " << mismatches
       << " mismatches" << (mismatches ? " (first " + first + ")" : "");
    return {mismatches == 0, os.str()};
}

Outcome worked_example() {
    const IntMatrix P{{1, 1, -2}, {0, 3, -3}};
    auto data = degree_data(P);
    bool ok = true;
    for (std::size_t skip = 0; skip < 3; ++skip) {
        std::vector<std::size_t> sigma;
        for (std::size_t j = 0; j < 3; ++j)
            if (j != skip) sigma.push_back(j);
        auto H = chart_group(P, data, sigma);
        ok = ok && H.size() == 3;
        for (auto& e : H) {
            if (e.is_identity()) continue;
            auto a = ages(P, data, sigma, e).alpha;
            std::sort(a.begin(), a.end());
            ok = ok && a == std::vector<Rational>{Rational(1, 3), Rational(2, 3)};
        }
        ok = ok && classify_chart(P, data, sigma) == SingularityClass::CanonicalStrict;
    }
    return {ok, "|H_sigma| = 3, alpha = (1/3, 2/3), canonical_strict on all three cones"};
}

Outcome fine_properties() {
    std::size_t sandwich = 0, equiv = 0, hull = 0, bad = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        for (int t = 0; t < (n == 4 ? 40 : 200); ++t) {
            auto D = random_lattice_polytope(n, n == 4 ? 2 : 3, static_cast<std::size_t>(uniform(0, 3)));
            auto r = fine_interior(D);
            ++sandwich;
            for (auto& p : lattice_points(D, true))
                if (!r.F.contains(lattice_point(p))) ++bad;
            for (auto& v : r.F.vertices)
                for (auto& h : D.halfspaces)
                    if (detail::dot(v, h.normal) <= h.offset) ++bad;
        }
        // Equivariance: one base polytope per batch of maps keeps the cost
        // of dimension four in check.
        RationalPolytope D = random_lattice_simplex(n, 2);
        FineResult r = fine_interior(D);
        for (int t = 0; t < 1000; ++t) {
            if (t % 50 == 0) {
                D = n == 1 ? random_lattice_polytope(1, 4, 0) : random_lattice_simplex(n, 2);
                r = fine_interior(D);
            }
            auto U = random_unimodular(n);
            auto DU = RationalPolytope::from_vertices(n, map_points(U, D.vertices));
            ++equiv;
            if (fine_interior(DU).F.vertices != map_points(U, r.F.vertices)) ++bad;
        }
        if (n <= 2)
            for (int t = 0; t < 300; ++t) {
                auto D = random_lattice_polytope(n, 4, static_cast<std::size_t>(uniform(0, 4)));
                std::vector<Point> pts;
                for (auto& p : lattice_points(D, true)) pts.push_back(lattice_point(p));
                ++hull;
                if (fine_interior(D).F != RationalPolytope::from_vertices(n, pts)) ++bad;
            }
    }
    std::ostringstream os;
    os << sandwich << " sandwich, " << equiv << " equivariance, " << hull << " interior-hull checks, " << bad << " violations";
    return {bad == 0, os.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fano_forge");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run(static_cast<int>(argv.size()), argv.data());
}

Outcome thread_determinism() {
    auto dir = fs::temp_directory_path() / "fano_forge_acceptance";
    fs::create_directories(dir);
    std::size_t compared = 0;
    for (std::string dim : {"2", "3"})
        for (std::string mode : {"canonical", "terminal"}) {
            std::string ref_c, ref_f;
            for (std::string jobs : {"1", "4", "16"}) {
                auto c = dir / ("c" + dim + mode + jobs), f = dir / ("f" + dim + mode + jobs);
                if (run_cli({"classify", "--dim", dim, "--mode", mode, "--jobs", jobs, "--out", c.string()}) != 0 ||
                    run_cli({"fine", "--in", c.string(), "--out", f.string(), "--jobs", jobs}) != 0)
                    return {false, "command failed for dim " + dim + " " + mode + " jobs " + jobs};
                auto bc = slurp(c), bf = slurp(f);
                if (jobs == "1") {
                    ref_c = bc;
                    ref_f = bf;
                } else if (bc != ref_c || bf != ref_f) {
                    return {false, "output differs for dim " + dim + " " + mode + " at " + jobs + " threads"};
                }
                compared += 2;
            }
        }
    return {true, std::to_string(compared) + " classify/fine outputs byte-identical across 1, 4, 16 threads"};
}

}  // namespace

int main() {
    std::cout.setf(std::ios::unitbuf);
    report(1, true, guarded([] { return count_records(3, Mode::Canonical, nullptr, 225); }));
    report(2, true, guarded([] {
               const std::string path = std::string(FANO_FORGE_DATA_DIR) + "/terminal_weights_dim4.txt";
               auto weights = cli::read_weight_file(path);
               std::vector<WeightVector> kept;
               for (auto w : weights) {
                   std::sort(w.begin(), w.end());
                   if (weight_vector_accepted(w, Mode::Terminal)) kept.push_back(w);
               }
               std::sort(kept.begin(), kept.end());
               kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
               auto o = count_records(4, Mode::Terminal, &kept, 35947);
               o.detail += " from " + std::to_string(kept.size()) + " terminal weight vectors";
               return o;
           }));
    canonical_four(std::getenv("FANO_FORGE_CANONICAL4_RECORDS"));
    report(6, true, guarded(oracle_equivalence));
    report(7, true, guarded(worked_example));
    report(8, true, guarded(fine_properties));
    report(9, true, guarded(thread_determinism));
    return failures_required ? 1 : 0;
}
