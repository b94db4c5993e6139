#pragma once

#define SPINCHAIN_VERSION "0.1.0"
