#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "qpcover/errors.hpp"

namespace qpcover {

/// Exact rational scalar. All arithmetic in the library is exact.
using Rat = mpq_class;

/// Renders as "p" for integers and "p/q" otherwise.
inline std::string rat_str(const Rat& r) {
    return r.get_str();
}

/// Parses "p" or "p/q" with arbitrary-precision integers.
inline Rat rat_parse(const std::string& s) {
    try {
        Rat r(s);
        r.canonicalize();
        return r;
    } catch (const std::invalid_argument&) {
        throw InputError("not a rational number: '" + s + "'");
    }
}

inline bool rat_is_integer(const Rat& r) {
    return r.get_den() == 1;
}

/// Exact conversion to a machine integer; throws if not representable.
inline long long rat_ll(const Rat& r) {
    if (!rat_is_integer(r) || !r.get_num().fits_slong_p())
        throw StructuralError("rational " + rat_str(r) + " is not a machine integer");
    return r.get_num().get_si();
}

using RatVec = std::vector<Rat>;
using RatMat = std::vector<std::vector<Rat>>;

} // namespace qpcover
