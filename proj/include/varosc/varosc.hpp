#ifndef VAROSC_VAROSC_HPP
#define VAROSC_VAROSC_HPP

#include "varosc/eigen.hpp"
#include "varosc/error.hpp"
#include "varosc/evolve.hpp"
#include "varosc/oscbasis.hpp"
#include "varosc/pms.hpp"
#include "varosc/potential.hpp"
#include "varosc/quadrature.hpp"
#include "varosc/spectrum.hpp"

#endif // VAROSC_VAROSC_HPP
