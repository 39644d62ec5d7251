#pragma once

#include "topoforge/csp.hpp"
#include "topoforge/error.hpp"
#include "topoforge/eval.hpp"
#include "topoforge/ilp.hpp"
#include "topoforge/instance.hpp"
#include "topoforge/io.hpp"
#include "topoforge/metrics.hpp"
#include "topoforge/mtr.hpp"
#include "topoforge/network.hpp"
#include "topoforge/parallel.hpp"
#include "topoforge/quantity.hpp"
#include "topoforge/shortest_paths.hpp"
#include "topoforge/vmtr.hpp"
