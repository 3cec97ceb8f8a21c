#pragma once

#include "enn/activation.hpp"
#include "enn/data.hpp"
#include "enn/linalg.hpp"
#include "enn/modelio.hpp"
#include "enn/network.hpp"
#include "enn/optim.hpp"
#include "enn/prune.hpp"
#include "enn/rng.hpp"
#include "enn/train.hpp"
