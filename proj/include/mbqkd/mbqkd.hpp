#pragma once

#include "mbqkd/adversary.hpp"
#include "mbqkd/analysis.hpp"
#include "mbqkd/devices.hpp"
#include "mbqkd/errors.hpp"
#include "mbqkd/fock.hpp"
#include "mbqkd/protocol.hpp"
#include "mbqkd/random.hpp"
#include "mbqkd/transcript.hpp"
