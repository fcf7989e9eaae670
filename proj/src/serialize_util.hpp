#pragma once

#include "ginnacer/linalg.hpp"

#include <cstdio>
#include <string>

namespace ginnacer::detail {

// %.17g keeps enough digits for doubles to round-trip bit-exactly and is
// locale-independent under the default "C" locale. Negative zero is
// normalized: JSON parsers read "-0" back as integer zero.
inline std::string fmt_double(double v) {
    if (v == 0.0)
        return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void append_vector(std::string& out, const Vector& v) {
    out += '[';
    for (Index i = 0; i < v.size(); ++i) {
        if (i > 0)
            out += ',';
        out += fmt_double(v(i));
    }
    out += ']';
}

inline void append_matrix(std::string& out, const Matrix& m) {
    out += '[';
    for (Index i = 0; i < m.rows(); ++i) {
        if (i > 0)
            out += ',';
        out += '[';
        for (Index j = 0; j < m.cols(); ++j) {
            if (j > 0)
                out += ',';
            out += fmt_double(m(i, j));
        }
        out += ']';
    }
    out += ']';
}

} // namespace ginnacer::detail
