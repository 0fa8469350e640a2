#pragma once

#include "bpsys/errors.hpp"
#include "bpsys/net.hpp"
#include "bpsys/graph.hpp"
#include "bpsys/net_core.hpp"
#include "bpsys/bp.hpp"
#include "bpsys/derive.hpp"
#include "bpsys/structure.hpp"
#include "bpsys/behavior.hpp"
#include "bpsys/verify.hpp"
#include "bpsys/synthesis.hpp"
#include "bpsys/io.hpp"
#include "bpsys/fixtures.hpp"
