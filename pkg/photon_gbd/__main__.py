import sys

from photon_gbd.cli import main

sys.exit(main())
