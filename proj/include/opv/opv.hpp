#pragma once

// Umbrella header.

#include "opv/bounds.hpp"
#include "opv/dsl.hpp"
#include "opv/error.hpp"
#include "opv/funcatalog.hpp"
#include "opv/matfun.hpp"
#include "opv/matrix_json.hpp"
#include "opv/perspectives.hpp"
#include "opv/verify.hpp"
