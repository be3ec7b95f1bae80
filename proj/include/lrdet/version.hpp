#pragma once

#define LRDET_VERSION "0.1.0"
