#pragma once

#include "sksv/bounds.hpp"
#include "sksv/errors.hpp"
#include "sksv/graph_stream.hpp"
#include "sksv/jl_sketch.hpp"
#include "sksv/oracle.hpp"
#include "sksv/spectral.hpp"
#include "sksv/stream_io.hpp"
#include "sksv/turnstile.hpp"
