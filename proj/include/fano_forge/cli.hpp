#pragma once
// Batch front-end: record files, checkpoint journal, subcommands.

#include "classify.hpp"
#include "fine.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

namespace fano_forge::cli {

using Json = nlohmann::ordered_json;

enum ExitCode : int { Ok = 0, VerificationFailed = 2, ResourceCap = 3, IoError = 4 };

class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FineBlock {
    int dim = -1;
    std::vector<Point> vertices;
    std::string key;
    // Normal form [-p, q] of a one-dimensional Fine interior.
    std::optional<std::pair<Rational, Rational>> segment;
};

struct Record {
    std::size_t dim = 0;
    Mode mode = Mode::Canonical;
    DegreeMatrix Q;
    SingularityClass cls = SingularityClass::Terminal;
    std::optional<IntMatrix> simplex;
    std::optional<FineBlock> fine;
};

Json to_json(const Record& r);
Record record_from_json(const Json& j);
std::string serialize(const Record& r);

std::vector<Record> read_records(std::istream& in);
std::vector<Record> read_records_file(const std::string& path);
void write_records(std::ostream& out, const std::vector<Record>& recs);

// One whitespace-separated tuple per line, '#' starts a comment.
std::vector<WeightVector> read_weight_file(std::istream& in);
std::vector<WeightVector> read_weight_file(const std::string& path);

std::uint64_t fnv1a(const std::string& s);

// Append-only journal of finished weight vectors.
class Journal {
public:
    Journal(std::string path, std::size_t dim, Mode mode);
    // Records of a weight vector already journaled, if intact.
    std::optional<std::vector<Record>> lookup(const WeightVector& w) const;
    void append(const WeightVector& w, const std::vector<Record>& recs);
    std::size_t size() const { return done_.size(); }

private:
    std::string path_;
    std::size_t dim_;
    Mode mode_;
    std::map<WeightVector, std::vector<Record>> done_;
};

Record make_record(const ClassificationRecord& c, Mode mode, bool with_simplex);
FineBlock compute_fine(const Record& r);

struct VerifyReport {
    std::size_t total = 0;
    std::vector<std::pair<std::size_t, std::string>> failures;
};
VerifyReport verify_records(const std::vector<Record>& recs, unsigned threads);

unsigned default_jobs();

// Entry point of the executable; returns the process exit code.
int run(int argc, char** argv);

}  // namespace fano_forge::cli
