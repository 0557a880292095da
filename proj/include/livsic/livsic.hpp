#ifndef LIVSIC_LIVSIC_HPP
#define LIVSIC_LIVSIC_HPP

#include "livsic/errors.hpp"
#include "livsic/rational.hpp"
#include "livsic/linalg.hpp"
#include "livsic/base_common.hpp"
#include "livsic/torus.hpp"
#include "livsic/sft.hpp"
#include "livsic/cocycle.hpp"
#include "livsic/periodic.hpp"
#include "livsic/holonomy.hpp"
#include "livsic/transfer.hpp"
#include "livsic/synth.hpp"
#include "livsic/config.hpp"
#include "livsic/report.hpp"

#endif
