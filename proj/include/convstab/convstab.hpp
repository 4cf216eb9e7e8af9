#pragma once

#include "convstab/errors.hpp"
#include "convstab/sparse_sequence.hpp"
#include "convstab/autocorr_toeplitz.hpp"
#include "convstab/freiman.hpp"
#include "convstab/alpha_bounds.hpp"
#include "convstab/random.hpp"
#include "convstab/parallel.hpp"
#include "convstab/json_io.hpp"
