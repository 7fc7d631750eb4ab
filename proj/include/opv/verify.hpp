#pragma once

#include "opv/verify/campaign.hpp"
#include "opv/verify/catalog.hpp"
#include "opv/verify/generate.hpp"
