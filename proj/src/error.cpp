// SPDX-License-Identifier: Apache-2.0

#include "lcs/error.hpp"

namespace lcs {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::dimension: return "dimension mismatch";
    case Errc::not_found: return "not found";
    case Errc::io: return "i/o error";
    case Errc::malformed: return "malformed data";
    case Errc::unsupported: return "unsupported format";
    case Errc::truncated: return "truncated data";
    case Errc::capacity: return "capacity exceeded";
    case Errc::divergence: return "solver diverged";
    case Errc::mismatch: return "incompatible inputs";
  }
  return "unknown error";
}

}  // namespace lcs
