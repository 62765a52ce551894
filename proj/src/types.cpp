#include <bsvd/types.hpp>

namespace bsvd {

char dtype_letter(Dtype d) {
    switch (d) {
    case Dtype::real_single: return 's';
    case Dtype::real_double: return 'd';
    case Dtype::complex_single: return 'c';
    case Dtype::complex_double: return 'z';
    }
    throw DomainError("unknown dtype");
}

Dtype dtype_from_letter(char c) {
    switch (c) {
    case 's': case 'S': return Dtype::real_single;
    case 'd': case 'D': return Dtype::real_double;
    case 'c': case 'C': return Dtype::complex_single;
    case 'z': case 'Z': return Dtype::complex_double;
    }
    throw DomainError(std::string("unknown dtype letter '") + c + "'");
}

bool dtype_is_double(Dtype d) {
    return d == Dtype::real_double || d == Dtype::complex_double;
}

double dtype_threshold(Dtype d, double k) {
    return dtype_is_double(d) ? k * unit_roundoff<double>()
                              : k * static_cast<double>(unit_roundoff<float>());
}

} // namespace bsvd
