// afdm.hpp - umbrella header

#pragma once

#include "afdm/bistatic_rx.hpp"
#include "afdm/channel.hpp"
#include "afdm/daft.hpp"
#include "afdm/estimation.hpp"
#include "afdm/fft.hpp"
#include "afdm/frame.hpp"
#include "afdm/mono_rx.hpp"
#include "afdm/parallel.hpp"
#include "afdm/random.hpp"
#include "afdm/sequences.hpp"
#include "afdm/signature.hpp"
#include "afdm/types.hpp"
