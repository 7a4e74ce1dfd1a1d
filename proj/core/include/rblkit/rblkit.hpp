#pragma once

#include "rblkit/body.hpp"
#include "rblkit/completion.hpp"
#include "rblkit/embedding.hpp"
#include "rblkit/error.hpp"
#include "rblkit/harness.hpp"
#include "rblkit/measurement.hpp"
#include "rblkit/rotation.hpp"
#include "rblkit/translation.hpp"
#include "rblkit/version.hpp"
