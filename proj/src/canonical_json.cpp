#include "mflq/canonical_json.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mflq {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    std::string s(buf);
    // Keep the token a JSON float so integers-valued doubles stay doubles.
    if (s.find_first_of(".eEn") == std::string::npos) {
        s += ".0";
    }
    return s;
}

namespace {

bool is_flat(const Json& j) {
    if (!j.is_array()) {
        return false;
    }
    for (const auto& e : j) {
        if (e.is_object()) {
            return false;
        }
        if (e.is_array() && !is_flat(e)) {
            return false;
        }
    }
    return true;
}

void write_scalar(const Json& j, std::ostringstream& os) {
    if (j.is_number_float()) {
        const double v = j.get<double>();
        if (std::isfinite(v)) {
            os << format_double(v);
        } else {
            os << "null";
        }
    } else {
        os << j.dump();
    }
}

void write_inline(const Json& j, std::ostringstream& os) {
    if (!j.is_array()) {
        write_scalar(j, os);
        return;
    }
    os << '[';
    bool first = true;
    for (const auto& e : j) {
        if (!first) {
            os << ", ";
        }
        first = false;
        write_inline(e, os);
    }
    os << ']';
}

void write(const Json& j, std::ostringstream& os, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    if (j.is_object()) {
        if (j.empty()) {
            os << "{}";
            return;
        }
        os << "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                os << ",\n";
            }
            first = false;
            os << pad << Json(it.key()).dump() << ": ";
            write(it.value(), os, depth + 1);
        }
        os << '\n' << close_pad << '}';
    } else if (j.is_array() && !is_flat(j)) {
        os << "[\n";
        bool first = true;
        for (const auto& e : j) {
            if (!first) {
                os << ",\n";
            }
            first = false;
            os << pad;
            write(e, os, depth + 1);
        }
        os << '\n' << close_pad << ']';
    } else {
        write_inline(j, os);
    }
}

}  // namespace

std::string to_canonical_json(const Json& j) {
    std::ostringstream os;
    write(j, os, 0);
    os << '\n';
    return os.str();
}

}  // namespace mflq
