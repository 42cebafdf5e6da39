#ifndef MEMDYN_MEMDYN_HPP_
#define MEMDYN_MEMDYN_HPP_

#include "memdyn/bessel.hpp"
#include "memdyn/cavity_response.hpp"
#include "memdyn/config.hpp"
#include "memdyn/constants.hpp"
#include "memdyn/csv.hpp"
#include "memdyn/detection.hpp"
#include "memdyn/errors.hpp"
#include "memdyn/langevin.hpp"
#include "memdyn/model.hpp"
#include "memdyn/noise.hpp"
#include "memdyn/roots.hpp"
#include "memdyn/slowflow.hpp"
#include "memdyn/spectral.hpp"
#include "memdyn/trajectory_io.hpp"

#endif  // MEMDYN_MEMDYN_HPP_
