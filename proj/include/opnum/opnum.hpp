#pragma once

#include "opnum/arith.hpp"
#include "opnum/classify.hpp"
#include "opnum/errors.hpp"
#include "opnum/identities.hpp"
#include "opnum/json_io.hpp"
#include "opnum/quad_order.hpp"
#include "opnum/search.hpp"
