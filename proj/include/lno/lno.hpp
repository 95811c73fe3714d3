#pragma once

#include "lno/augment.hpp"
#include "lno/boundary.hpp"
#include "lno/burgers.hpp"
#include "lno/checkpoint.hpp"
#include "lno/dataset.hpp"
#include "lno/errors.hpp"
#include "lno/fft.hpp"
#include "lno/grid_field.hpp"
#include "lno/ibm.hpp"
#include "lno/kernels.hpp"
#include "lno/legendre.hpp"
#include "lno/model.hpp"
#include "lno/navier_stokes.hpp"
#include "lno/ops.hpp"
#include "lno/random_fields.hpp"
#include "lno/reference_tables.hpp"
#include "lno/spectral.hpp"
#include "lno/tape.hpp"
#include "lno/train.hpp"
#include "lno/trajectory.hpp"
#include "lno/wave.hpp"
