#pragma once

// Umbrella header for the nanotrap library.

#include "nanotrap/errors.hpp"
#include "nanotrap/field.hpp"
#include "nanotrap/grid_io.hpp"
#include "nanotrap/hash.hpp"
#include "nanotrap/landscape.hpp"
#include "nanotrap/potential.hpp"
#include "nanotrap/render.hpp"
#include "nanotrap/report.hpp"
#include "nanotrap/scene.hpp"
#include "nanotrap/scene_config.hpp"
#include "nanotrap/tuner.hpp"
#include "nanotrap/vec3.hpp"
