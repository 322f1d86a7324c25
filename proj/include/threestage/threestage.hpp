#pragma once

#include "threestage/adversary.hpp"
#include "threestage/channel.hpp"
#include "threestage/errors.hpp"
#include "threestage/opsets.hpp"
#include "threestage/protocol.hpp"
#include "threestage/qcore.hpp"
#include "threestage/random.hpp"
#include "threestage/session.hpp"
#include "threestage/sift.hpp"
