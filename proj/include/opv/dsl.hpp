#pragma once

#include "opv/dsl/ast.hpp"
#include "opv/dsl/eval.hpp"
