#ifndef STROUT_STROUT_HPP
#define STROUT_STROUT_HPP

#include "strout/errors.hpp"
#include "strout/expharness.hpp"
#include "strout/hierarchy.hpp"
#include "strout/hilre.hpp"
#include "strout/hilre_detect.hpp"
#include "strout/lof.hpp"
#include "strout/parallel.hpp"
#include "strout/rational.hpp"
#include "strout/strdist.hpp"
#include "strout/utf8.hpp"

namespace strout {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace strout

#endif  // STROUT_STROUT_HPP
