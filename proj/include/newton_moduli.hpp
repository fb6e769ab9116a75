#ifndef NEWTON_MODULI_HPP
#define NEWTON_MODULI_HPP

#include "newton_moduli/core.hpp"
#include "newton_moduli/moduli.hpp"
#include "newton_moduli/angles.hpp"
#include "newton_moduli/dynamics.hpp"
#include "newton_moduli/rays.hpp"
#include "newton_moduli/render.hpp"
#include "newton_moduli/parse.hpp"

#endif  // NEWTON_MODULI_HPP
