from invlim.cli import main

raise SystemExit(main())
