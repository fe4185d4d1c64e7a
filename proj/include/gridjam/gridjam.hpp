#pragma once

#include "gridjam/attack_design.hpp"
#include "gridjam/attack_verify.hpp"
#include "gridjam/casefile.hpp"
#include "gridjam/cut.hpp"
#include "gridjam/errors.hpp"
#include "gridjam/estimator.hpp"
#include "gridjam/experiment.hpp"
#include "gridjam/grid_model.hpp"
#include "gridjam/mincut.hpp"
#include "gridjam/oracle.hpp"
