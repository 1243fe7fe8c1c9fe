#pragma once

#include "calr/config.hpp"
#include "calr/energy.hpp"
#include "calr/errors.hpp"
#include "calr/field.hpp"
#include "calr/harmonics.hpp"
#include "calr/mode_energy.hpp"
#include "calr/modes.hpp"
#include "calr/radial_oracle.hpp"
#include "calr/scaled_complex.hpp"
#include "calr/variational.hpp"
#include "calr/version.hpp"
