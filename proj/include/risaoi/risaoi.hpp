#pragma once

#include "risaoi/linalg.hpp"
#include "risaoi/sdp.hpp"
#include "risaoi/rng.hpp"
#include "risaoi/channel.hpp"
#include "risaoi/ris_phase.hpp"
#include "risaoi/noma.hpp"
#include "risaoi/clustering.hpp"
#include "risaoi/aoi.hpp"
#include "risaoi/experiment.hpp"
