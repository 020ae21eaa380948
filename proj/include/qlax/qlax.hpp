#ifndef QLAX_QLAX_HPP
#define QLAX_QLAX_HPP

#include "qlax/errors.hpp"
#include "qlax/tensor.hpp"
#include "qlax/rmatrix.hpp"
#include "qlax/chain.hpp"
#include "qlax/evolution.hpp"
#include "qlax/report.hpp"

#endif  // QLAX_QLAX_HPP
