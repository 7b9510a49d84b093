#include "kgsym/report.hpp"

#include <cstdio>
#include <sstream>

namespace kgsym {

namespace {

const char* status_word(CheckRecord::Status s) {
    switch (s) {
        case CheckRecord::Status::Pass: return "pass";
        case CheckRecord::Status::Fail: return "fail";
        case CheckRecord::Status::FlaggedTypo: return "flagged-typo";
    }
    return "?";
}

void json_escape(std::ostringstream& os, const std::string& s) {
    os << '"';
    for (char c : s) {
        switch (c) {
            case '"': os << "\\\""; break;
            case '\\': os << "\\\\"; break;
            case '\n': os << "\\n"; break;
            case '\t': os << "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    os << buf;
                } else {
                    os << c;
                }
        }
    }
    os << '"';
}

}  // namespace

std::string format_float_17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void Report::pass(const std::string& id, const std::string& anchor,
                  const std::string& desc, double residual) {
    add({id, anchor, desc, CheckRecord::Status::Pass, residual});
}
void Report::fail(const std::string& id, const std::string& anchor,
                  const std::string& desc, double residual) {
    add({id, anchor, desc, CheckRecord::Status::Fail, residual});
}
void Report::flagged(const std::string& id, const std::string& anchor,
                     const std::string& desc, double residual) {
    add({id, anchor, desc, CheckRecord::Status::FlaggedTypo, residual});
}

int Report::count(CheckRecord::Status s) const {
    int n = 0;
    for (const auto& c : checks)
        if (c.status == s) ++n;
    return n;
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "kgsym " << version << "  seed=" << seed << "  tol=" << format_float_17(tol)
       << "\n";
    for (const auto& c : checks) {
        os << "[" << status_word(c.status) << "] " << c.id
           << "  residual=" << format_float_17(c.residual);
        if (!c.description.empty()) os << "  " << c.description;
        os << "\n";
    }
    os << "summary: pass=" << count(CheckRecord::Status::Pass)
       << " fail=" << count(CheckRecord::Status::Fail)
       << " flagged=" << count(CheckRecord::Status::FlaggedTypo) << "\n";
    return os.str();
}

std::string Report::to_json() const {
    std::ostringstream os;
    os << "{\"meta\":{\"seed\":" << seed << ",\"tol\":" << format_float_17(tol)
       << ",\"version\":";
    json_escape(os, version);
    os << "},\"checks\":[";
    bool first = true;
    for (const auto& c : checks) {
        if (!first) os << ",";
        first = false;
        os << "{\"id\":";
        json_escape(os, c.id);
        os << ",\"anchor\":";
        json_escape(os, c.anchor);
        os << ",\"status\":\"" << status_word(c.status)
           << "\",\"residual\":" << format_float_17(c.residual) << "}";
    }
    os << "],\"summary\":{\"pass\":" << count(CheckRecord::Status::Pass)
       << ",\"fail\":" << count(CheckRecord::Status::Fail)
       << ",\"flagged\":" << count(CheckRecord::Status::FlaggedTypo) << "}}";
    return os.str();
}

}  // namespace kgsym
