#include "fano_forge/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

namespace fano_forge::cli {

namespace {

Mode parse_mode(const std::string& s) {
    if (s == "canonical") return Mode::Canonical;
    if (s == "terminal") return Mode::Terminal;
    throw InvalidInput("unknown mode '" + s + "'");
}

SingularityClass parse_class(const std::string& s) {
    if (s == "terminal") return SingularityClass::Terminal;
    if (s == "canonical_strict") return SingularityClass::CanonicalStrict;
    if (s == "non_canonical") return SingularityClass::NonCanonical;
    throw InvalidInput("unknown class '" + s + "'");
}

Json point_json(const Point& p) {
    Json a = Json::array();
    for (auto& c : p) a.push_back(rational_string(c));
    return a;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoFailure("cannot open '" + path + "' for writing");
    return f;
}

// Writes to the file or to stdout when the path is empty or "-".
template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        std::cout.flush();
        if (!std::cout) throw IoFailure("write to stdout failed");
        return;
    }
    auto f = open_out(path);
    fn(f);
    f.flush();
    if (!f) throw IoFailure("write to '" + path + "' failed");
}

std::vector<ClassificationRecord> to_classification(const std::vector<Record>& recs) {
    std::vector<ClassificationRecord> out;
    for (auto& r : recs) out.push_back({r.Q, r.cls});
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Records.

Json to_json(const Record& r) {
    Json j;
    j["dim"] = r.dim;
    j["mode"] = to_string(r.mode);
    j["weights"] = r.Q.w;
    Json t = Json::array();
    for (auto& row : r.Q.rows) {
        Json e;
        e["mu"] = row.mu;
        e["eta"] = row.eta;
        t.push_back(e);
    }
    j["torsion"] = t;
    j["class"] = to_string(r.cls);
    if (r.simplex) {
        Json s = Json::array();
        for (std::size_t i = 0; i < r.simplex->rows(); ++i) {
            Json row = Json::array();
            for (std::size_t k = 0; k < r.simplex->cols(); ++k) row.push_back(to_i64((*r.simplex)(i, k)));
            s.push_back(row);
        }
        j["simplex"] = s;
    }
    if (r.fine) {
        Json f;
        f["dim"] = r.fine->dim;
        Json v = Json::array();
        for (auto& p : r.fine->vertices) v.push_back(point_json(p));
        f["vertices"] = v;
        f["key"] = r.fine->key;
        int kod = r.fine->dim < 0 ? kNoCanonicalModel : std::min(r.fine->dim, static_cast<int>(r.dim) - 1);
        if (kod == kNoCanonicalModel) f["kodaira"] = nullptr;
        else f["kodaira"] = kod;
        if (r.fine->segment)
            f["segment"] = Json::array({rational_string(r.fine->segment->first), rational_string(r.fine->segment->second)});
        j["fine"] = f;
    }
    return j;
}

Record record_from_json(const Json& j) {
    Record r;
    r.dim = j.at("dim").get<std::size_t>();
    r.mode = parse_mode(j.at("mode").get<std::string>());
    r.Q.w = j.at("weights").get<WeightVector>();
    for (auto& e : j.at("torsion")) r.Q.rows.push_back({e.at("mu").get<std::int64_t>(), e.at("eta").get<std::vector<std::int64_t>>()});
    r.cls = parse_class(j.at("class").get<std::string>());
    if (r.Q.w.size() != r.dim + 1) throw InvalidInput("weight vector length does not match dim");
    if (j.contains("simplex")) {
        auto rows = j.at("simplex").get<std::vector<std::vector<std::int64_t>>>();
        if (rows.empty()) throw InvalidInput("empty simplex");
        IntMatrix S(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows[0].size()) throw InvalidInput("ragged simplex");
            for (std::size_t k = 0; k < rows[i].size(); ++k) S(i, k) = rows[i][k];
        }
        r.simplex = S;
    }
    if (j.contains("fine")) {
        const auto& f = j.at("fine");
        FineBlock b;
        b.dim = f.at("dim").get<int>();
        for (auto& p : f.at("vertices")) {
            Point x;
            for (auto& c : p) x.push_back(parse_rational(c.get<std::string>()));
            b.vertices.push_back(x);
        }
        b.key = f.value("key", std::string());
        if (f.contains("segment")) {
            const auto& s = f.at("segment");
            b.segment = std::make_pair(parse_rational(s.at(0).get<std::string>()), parse_rational(s.at(1).get<std::string>()));
        }
        r.fine = b;
    }
    return r;
}

std::string serialize(const Record& r) { return to_json(r).dump(); }

std::vector<Record> read_records(std::istream& in) {
    std::vector<Record> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            throw IoFailure("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<Record> read_records_file(const std::string& path) {
    if (path == "-") return read_records(std::cin);
    std::ifstream f(path);
    if (!f) throw IoFailure("cannot open '" + path + "'");
    return read_records(f);
}

void write_records(std::ostream& out, const std::vector<Record>& recs) {
    for (auto& r : recs) out << serialize(r) << '\n';
}

std::vector<WeightVector> read_weight_file(std::istream& in) {
    std::vector<WeightVector> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream is(line);
        WeightVector w;
        std::string tok;
        while (is >> tok) {
            std::size_t pos = 0;
            long long v = 0;
            try {
                v = std::stoll(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tok.size()) throw IoFailure("weight file line " + std::to_string(lineno) + ": bad token '" + tok + "'");
            w.push_back(v);
        }
        if (!w.empty()) out.push_back(w);
    }
    return out;
}

std::vector<WeightVector> read_weight_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoFailure("cannot open weight file '" + path + "'");
    return read_weight_file(f);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Journal: one JSON line per finished weight vector with a hash of its
// serialized records; damaged or foreign lines are ignored on resume.

Journal::Journal(std::string path, std::size_t dim, Mode mode) : path_(std::move(path)), dim_(dim), mode_(mode) {
    std::ifstream f(path_);
    if (!f) return;
    std::string line;
    while (std::getline(f, line)) {
        try {
            auto j = Json::parse(line);
            if (j.at("dim").get<std::size_t>() != dim_ || j.at("mode").get<std::string>() != to_string(mode_)) continue;
            std::vector<Record> recs;
            std::string blob;
            for (auto& rj : j.at("records")) {
                recs.push_back(record_from_json(rj));
                blob += serialize(recs.back());
                blob += '\n';
            }
            std::ostringstream hs;
            hs << std::hex << std::setw(16) << std::setfill('0') << fnv1a(blob);
            if (hs.str() != j.at("hash").get<std::string>()) continue;
            done_[j.at("weights").get<WeightVector>()] = std::move(recs);
        } catch (const std::exception&) {
            continue;  // torn write at the end of an interrupted run
        }
    }
}

std::optional<std::vector<Record>> Journal::lookup(const WeightVector& w) const {
    auto it = done_.find(w);
    if (it == done_.end()) return std::nullopt;
    return it->second;
}

void Journal::append(const WeightVector& w, const std::vector<Record>& recs) {
    Json j;
    j["dim"] = dim_;
    j["mode"] = to_string(mode_);
    j["weights"] = w;
    Json arr = Json::array();
    std::string blob;
    for (auto& r : recs) {
        arr.push_back(to_json(r));
        blob += serialize(r);
        blob += '\n';
    }
    j["records"] = arr;
    std::ostringstream hs;
    hs << std::hex << std::setw(16) << std::setfill('0') << fnv1a(blob);
    j["hash"] = hs.str();
    std::ofstream f(path_, std::ios::app | std::ios::binary);
    if (!f) throw IoFailure("cannot append to journal '" + path_ + "'");
    f << j.dump() << '\n';
    f.flush();
    if (!f) throw IoFailure("journal write failed");
    done_[w] = recs;
}

// ---------------------------------------------------------------------------

Record make_record(const ClassificationRecord& c, Mode mode, bool with_simplex) {
    Record r;
    r.dim = c.Q.dim();
    r.mode = mode;
    r.Q = c.Q;
    r.cls = c.cls;
    if (with_simplex) r.simplex = simplex(c.Q);
    return r;
}

FineBlock compute_fine(const Record& r) {
    IntMatrix S = r.simplex ? *r.simplex : simplex(r.Q);
    auto D = polytope_of_columns(S);
    auto res = fine_interior(D);
    FineBlock b;
    b.dim = res.dim;
    b.vertices = res.F.vertices;
    b.key = res.F.empty() ? std::string("empty") : unimodular_key(res.F);
    if (res.dim == 1) {
        auto nf = unimodular_normal_form(res.F);
        if (nf.rank == 1) b.segment = segment_normal_form(res.F);
    }
    return b;
}

VerifyReport verify_records(const std::vector<Record>& recs, unsigned threads) {
    VerifyReport rep;
    rep.total = recs.size();
    std::vector<std::string> why(recs.size());
    threads = std::max(1u, threads);
    std::vector<AutomorphismCache> caches(threads);
    detail::parallel_for(recs.size(), threads, [&](std::size_t i, unsigned worker) {
        const auto& r = recs[i];
        try {
            if (!is_almost_free(r.Q)) { why[i] = "degree matrix is not almost free"; return; }
            if (r.Q.dim() != r.dim) { why[i] = "dimension mismatch"; return; }
            auto cls = classify(r.Q);
            if (cls != r.cls) { why[i] = std::string("class mismatch: computed ") + to_string(cls); return; }
            if (!accepted(cls, r.mode)) { why[i] = "class not admitted by mode"; return; }
            auto S = simplex(r.Q);
            if (r.simplex && !(*r.simplex == S)) { why[i] = "stored simplex differs from reconstruction"; return; }
            auto oracle = lattice_point_oracle(S);
            if (oracle != cls) { why[i] = std::string("lattice oracle disagrees: ") + to_string(oracle); return; }
            if (!(minimal_representative(r.Q, caches[worker]) == r.Q)) { why[i] = "not the minimal representative"; return; }
        } catch (const ResourceError&) {
            throw;
        } catch (const std::exception& e) {
            why[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (why[i].empty() && i > 0) {
            const auto& a = recs[i - 1];
            const auto& b = recs[i];
            if (a.dim == b.dim && !(a.Q < b.Q)) why[i] = a.Q == b.Q ? "duplicate record" : "records out of order";
        }
        if (!why[i].empty()) rep.failures.push_back({i, why[i]});
    }
    return rep;
}

unsigned default_jobs() {
    if (const char* e = std::getenv("FANO_FORGE_THREADS")) {
        try {
            long v = std::stol(e);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return 1;
}

// ---------------------------------------------------------------------------
// Subcommands.

namespace {

struct ClassifyArgs {
    std::size_t dim = 0;
    std::string mode = "canonical";
    unsigned jobs = 1;
    std::string weights_file, checkpoint, out;
    std::int64_t max_weight_sum = 0;
    bool no_simplex = false;
};

int cmd_classify(const ClassifyArgs& a) {
    const Mode mode = parse_mode(a.mode);
    if (a.dim < 1) throw InvalidInput("--dim must be positive");
    std::vector<WeightVector> weights;
    if (!a.weights_file.empty()) {
        std::set<WeightVector> uniq;
        std::size_t dropped = 0;
        for (auto w : read_weight_file(a.weights_file)) {
            std::sort(w.begin(), w.end());
            if (w.size() != a.dim + 1) throw InvalidInput("weight tuple of wrong length in weight file");
            if (weight_vector_accepted(w, mode)) uniq.insert(w);
            else ++dropped;
        }
        if (dropped) std::cerr << "classify: ignored " << dropped << " weight tuples not admitted by mode\n";
        weights.assign(uniq.begin(), uniq.end());
    } else {
        WeightSearchOptions wo;
        wo.threads = a.jobs;
        if (a.max_weight_sum > 0) wo.max_weight_sum = a.max_weight_sum;
        weights = enumerate_weight_vectors(a.dim, mode, wo);
    }
    std::optional<Journal> journal;
    if (!a.checkpoint.empty()) journal.emplace(a.checkpoint, a.dim, mode);
    ClassifyOptions opt;
    opt.threads = a.jobs;
    const bool with_simplex = !a.no_simplex;
    auto on_shard = [&](std::size_t i, const std::vector<ClassificationRecord>& recs) {
        if (!journal) return;
        std::vector<Record> rs;
        for (auto& c : recs) rs.push_back(make_record(c, mode, with_simplex));
        journal->append(weights[i], rs);
    };
    auto resume = [&](std::size_t i) -> std::optional<std::vector<ClassificationRecord>> {
        if (!journal) return std::nullopt;
        if (auto prev = journal->lookup(weights[i])) return to_classification(*prev);
        return std::nullopt;
    };
    auto recs = classify_weight_list(weights, mode, opt, on_shard, resume);
    std::vector<Record> out;
    out.reserve(recs.size());
    for (auto& c : recs) out.push_back(make_record(c, mode, with_simplex));
    with_output(a.out, [&](std::ostream& os) { write_records(os, out); });
    std::cerr << "classify: " << weights.size() << " weight vectors, " << out.size() << " records\n";
    return ExitCode::Ok;
}

struct WeightsArgs {
    std::size_t dim = 0;
    std::string mode = "canonical";
    unsigned jobs = 1;
    std::int64_t min_weight_sum = 0, max_weight_sum = 0;
    std::string out;
};

int cmd_weights(const WeightsArgs& a) {
    const Mode mode = parse_mode(a.mode);
    if (a.dim < 1) throw InvalidInput("--dim must be positive");
    WeightSearchOptions wo;
    wo.threads = a.jobs;
    std::vector<WeightVector> ws;
    if (a.max_weight_sum > 0) {
        std::int64_t lo = std::max<std::int64_t>(a.min_weight_sum, static_cast<std::int64_t>(a.dim + 1));
        ws = weight_vectors_by_sum(a.dim, mode, lo, a.max_weight_sum, wo);
    } else {
        ws = enumerate_weight_vectors(a.dim, mode, wo);
    }
    with_output(a.out, [&](std::ostream& os) {
        for (auto& w : ws) {
            for (std::size_t i = 0; i < w.size(); ++i) os << (i ? " " : "") << w[i];
            os << '\n';
        }
    });
    std::cerr << "weights: " << ws.size() << " weight vectors\n";
    return ExitCode::Ok;
}

int cmd_verify(const std::string& in, unsigned jobs) {
    auto recs = read_records_file(in);
    auto rep = verify_records(recs, jobs);
    for (auto& [i, msg] : rep.failures) std::cout << "record " << i << ": FAIL " << msg << '\n';
    std::cout << "verified " << rep.total << " records, " << rep.failures.size() << " failures\n";
    return rep.failures.empty() ? ExitCode::Ok : ExitCode::VerificationFailed;
}

int cmd_fine(const std::string& in, const std::string& out, unsigned jobs) {
    auto recs = read_records_file(in);
    detail::parallel_for(recs.size(), std::max(1u, jobs), [&](std::size_t i, unsigned) { recs[i].fine = compute_fine(recs[i]); });
    with_output(out, [&](std::ostream& os) { write_records(os, recs); });
    return ExitCode::Ok;
}

int cmd_stats(const std::string& in, const std::string& by, const std::string& extra, const std::string& out) {
    auto recs = read_records_file(in);
    std::vector<std::string> extra_vals;
    if (!extra.empty()) {
        std::ifstream f(extra);
        if (!f) throw IoFailure("cannot open extra column '" + extra + "'");
        std::string line;
        while (std::getline(f, line))
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                line.erase(line.find_last_not_of(" \t\r") + 1);
                line.erase(0, line.find_first_not_of(" \t"));
                extra_vals.push_back(line);
            }
        if (extra_vals.size() != recs.size()) throw InvalidInput("extra column length differs from record count");
    }
    auto need_fine = [&](const Record& r) -> const FineBlock& {
        if (!r.fine) throw InvalidInput("record lacks a fine block; run the fine command first");
        return *r.fine;
    };
    with_output(out, [&](std::ostream& os) {
        if (by == "fine_dim" || by == "weights") {
            std::map<std::string, std::size_t> counts;
            std::map<std::pair<std::string, std::string>, std::size_t> joint;
            std::map<std::string, std::string> order_key;
            for (std::size_t i = 0; i < recs.size(); ++i) {
                std::string k;
                if (by == "fine_dim") {
                    int d = need_fine(recs[i]).dim;
                    k = std::to_string(d);
                    std::ostringstream ok;
                    ok << std::setw(4) << std::setfill('0') << d + 1;
                    order_key[k] = ok.str();
                } else {
                    for (std::size_t t = 0; t < recs[i].Q.w.size(); ++t) k += (t ? " " : "") + std::to_string(recs[i].Q.w[t]);
                    order_key[k] = k;
                }
                if (extra_vals.empty()) ++counts[k];
                else ++joint[{k, extra_vals[i]}];
            }
            std::vector<std::pair<std::string, std::string>> keys;
            for (auto& [k, o] : order_key) keys.push_back({o, k});
            if (by == "weights") {
                // Numeric order of weight tuples.
                std::vector<std::pair<WeightVector, std::string>> ws;
                for (auto& [o, k] : keys) {
                    std::istringstream is(k);
                    WeightVector w;
                    std::int64_t x;
                    while (is >> x) w.push_back(x);
                    ws.push_back({w, k});
                }
                std::sort(ws.begin(), ws.end());
                keys.clear();
                for (auto& [w, k] : ws) keys.push_back({"", k});
            } else {
                std::sort(keys.begin(), keys.end());
            }
            if (extra_vals.empty()) {
                os << by << ",count\n";
                for (auto& [o, k] : keys) os << k << ',' << counts[k] << '\n';
            } else {
                os << by << ",value,count\n";
                for (auto& [o, k] : keys)
                    for (auto& [kv, c] : joint)
                        if (kv.first == k) os << k << ',' << kv.second << ',' << c << '\n';
            }
        } else if (by == "fine_key") {
            std::map<int, std::set<std::string>> keys;
            std::map<int, std::size_t> simplices;
            for (auto& r : recs) {
                const auto& f = need_fine(r);
                keys[f.dim].insert(f.key);
                ++simplices[f.dim];
            }
            os << "fine_dim,distinct_keys,simplices\n";
            for (auto& [d, s] : keys) os << d << ',' << s.size() << ',' << simplices[d] << '\n';
        } else {
            throw InvalidInput("--by must be fine_dim, fine_key or weights");
        }
    });
    return ExitCode::Ok;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"fano_forge: canonical and terminal fake weighted projective spaces"};
    app.require_subcommand(1);
    const unsigned jobs_default = default_jobs();

    ClassifyArgs ca;
    ca.jobs = jobs_default;
    auto* c = app.add_subcommand("classify", "enumerate minimal degree matrices");
    c->add_option("--dim", ca.dim, "dimension n")->required();
    c->add_option("--mode", ca.mode, "canonical or terminal")->check(CLI::IsMember({"canonical", "terminal"}));
    c->add_option("--jobs", ca.jobs, "worker threads (default: FANO_FORGE_THREADS or 1)")->check(CLI::PositiveNumber);
    c->add_option("--weights-file", ca.weights_file, "use these weight vectors instead of enumerating");
    c->add_option("--max-weight-sum", ca.max_weight_sum, "bound on the weight sum when enumeration must scan by sum");
    c->add_option("--checkpoint", ca.checkpoint, "journal file for resuming interrupted runs");
    c->add_option("--out", ca.out, "output file (default stdout)");
    c->add_flag("--no-simplex", ca.no_simplex, "omit generator matrices from records");

    WeightsArgs wa;
    wa.jobs = jobs_default;
    auto* w = app.add_subcommand("weights", "list admissible weight vectors");
    w->add_option("--dim", wa.dim, "dimension n")->required();
    w->add_option("--mode", wa.mode, "canonical or terminal")->check(CLI::IsMember({"canonical", "terminal"}));
    w->add_option("--jobs", wa.jobs, "worker threads")->check(CLI::PositiveNumber);
    w->add_option("--min-weight-sum", wa.min_weight_sum, "lower bound on the weight sum");
    w->add_option("--max-weight-sum", wa.max_weight_sum, "upper bound on the weight sum (scan by sum)");
    w->add_option("--out", wa.out, "output file (default stdout)");

    std::string v_in;
    unsigned v_jobs = jobs_default;
    auto* v = app.add_subcommand("verify", "re-check a record file");
    v->add_option("--in", v_in, "record file")->required();
    v->add_option("--jobs", v_jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string f_in, f_out;
    unsigned f_jobs = jobs_default;
    auto* f = app.add_subcommand("fine", "add Fine interiors to records");
    f->add_option("--in", f_in, "record file")->required();
    f->add_option("--out", f_out, "output file (default stdout)");
    f->add_option("--jobs", f_jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string s_in, s_by = "fine_dim", s_extra, s_out;
    auto* s = app.add_subcommand("stats", "aggregate a record file to CSV");
    s->add_option("--in", s_in, "record file")->required();
    s->add_option("--by", s_by, "fine_dim, fine_key or weights")->check(CLI::IsMember({"fine_dim", "fine_key", "weights"}));
    s->add_option("--extra-column", s_extra, "one scalar per record to histogram against the grouping");
    s->add_option("--out", s_out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        if (*c) return cmd_classify(ca);
        if (*w) return cmd_weights(wa);
        if (*v) return cmd_verify(v_in, v_jobs);
        if (*f) return cmd_fine(f_in, f_out, f_jobs);
        if (*s) return cmd_stats(s_in, s_by, s_extra, s_out);
    } catch (const ResourceError& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return ExitCode::ResourceCap;
    } catch (const IoFailure& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return ExitCode::IoError;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return ExitCode::VerificationFailed;
    }
    return ExitCode::Ok;
}

}  // namespace fano_forge::cli
