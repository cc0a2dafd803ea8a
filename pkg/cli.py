#!/usr/bin/env python3

from gbeta_lab.main import main

main()
