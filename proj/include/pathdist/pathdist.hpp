#pragma once

#include "pathdist/distance.hpp"
#include "pathdist/inner_product.hpp"
#include "pathdist/newick.hpp"
#include "pathdist/quad_poly.hpp"
#include "pathdist/rooted_tree.hpp"
#include "pathdist/segment_decomposition.hpp"
#include "pathdist/squared_paths.hpp"
#include "pathdist/testkit.hpp"
#include "pathdist/tree.hpp"
