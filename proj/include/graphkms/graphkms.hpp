#pragma once

#include "graphkms/boundary.hpp"
#include "graphkms/builtins.hpp"
#include "graphkms/cone.hpp"
#include "graphkms/errors.hpp"
#include "graphkms/graph.hpp"
#include "graphkms/io.hpp"
#include "graphkms/kms.hpp"
#include "graphkms/linalg.hpp"
#include "graphkms/measure.hpp"
#include "graphkms/polynomial.hpp"
#include "graphkms/rational.hpp"
