#ifndef KGSYM_REPORT_HPP
#define KGSYM_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace kgsym {

inline constexpr const char* kEngineVersion = "0.1.0";

/// One verification record. `anchor` names the catalog object being checked
/// (family/vector or table/row coordinates).
struct CheckRecord {
    enum class Status { Pass, Fail, FlaggedTypo };
    std::string id;
    std::string anchor;
    std::string description;
    Status status = Status::Pass;
    double residual = 0.0;
};

/// Deterministic run report. Text and JSON renderings are byte-stable for a
/// fixed seed and engine version; floats are serialized with 17 significant
/// digits.
struct Report {
    std::uint64_t seed = 42;
    double tol = 1e-9;
    std::string version = kEngineVersion;
    std::vector<CheckRecord> checks;

    void add(CheckRecord r) { checks.push_back(std::move(r)); }
    void pass(const std::string& id, const std::string& anchor, const std::string& desc,
              double residual);
    void fail(const std::string& id, const std::string& anchor, const std::string& desc,
              double residual);
    void flagged(const std::string& id, const std::string& anchor,
                 const std::string& desc, double residual);

    int count(CheckRecord::Status s) const;
    /// Exit contract: failures fail the run; flagged-typo records do not.
    bool ok() const { return count(CheckRecord::Status::Fail) == 0; }

    std::string to_text() const;
    std::string to_json() const;
};

std::string format_float_17(double v);

}  // namespace kgsym

#endif
